import pytest
from cgleval.config import EvalConfig, load_config_file
from cgleval.enums import EAggregationMode, EBorderMode, EMetric, EReportFormat
from cgleval.exceptions import ConfigError
from cgleval.masks import ClassRemap


def test_defaults():
    config = EvalConfig('pred', 'gt')

    assert config.metrics == (EMetric.MIoU, EMetric.ClassIoU, EMetric.DaR)
    assert config.positive_class == 1
    assert config.dar.sigma == 3.0 and config.dar.th == 0.999
    assert config.effective_remap == ClassRemap({0: 0}, default=1)
    assert config.iou_aggregation is EAggregationMode.PerImage


def test_from_mapping_converts_strings():
    config = EvalConfig.from_mapping({'pred-dir': 'p',
                                      'gt_dir': 'g',
                                      'metrics': 'dar, miou',
                                      'sigma': '2.5',
                                      'kernel-radius': '6',
                                      'border': 'replicate',
                                      'clamp-dar': 'yes',
                                      'iou-agg': 'global',
                                      'workers': '3',
                                      'format': 'csv',
                                      })

    assert config.metrics == (EMetric.MIoU, EMetric.DaR)
    assert config.dar.sigma == 2.5
    assert config.dar.radius == 6
    assert config.dar.border_mode is EBorderMode.Replicate
    assert config.dar.clamp_negative is True
    assert config.iou_aggregation is EAggregationMode.Global
    assert config.workers == 3
    assert config.output_format is EReportFormat.Csv


@pytest.mark.parametrize('settings', [
    {'pred-dir': 'p'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'bogus': '1'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'sigma': 'wide'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'th': '1.0'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'metrics': 'miou,f1'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'workers': '0'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'positive-class': '2'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'clamp-dar': 'maybe'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'border': 'wrap'},
    {'pred-dir': 'p', 'gt-dir': 'g', 'remap': '/nonexistent/remap.txt'},
])
def test_invalid_settings(settings):
    with pytest.raises(ConfigError):
        EvalConfig.from_mapping(settings)


def test_multiclass_remap(tmp_path):
    remap = tmp_path / 'remap.txt'
    remap.write_text("0=0\n100=1\n200=2\n")

    config = EvalConfig.from_mapping({'pred-dir': 'p', 'gt-dir': 'g',
                                      'num-classes': '3', 'remap': str(remap)})

    assert config.effective_remap == ClassRemap({0: 0, 100: 1, 200: 2})
    assert config.provenance()['remap'] == {'0': 0, '100': 1, '200': 2}
    assert EvalConfig('p', 'g', num_classes=3).effective_remap is None


def test_provenance_leaves_out_run_only_settings():
    one = EvalConfig('p', 'g', workers=1, output='a.json')
    four = EvalConfig('p', 'g', workers=4, output='b.csv', output_format='csv')

    assert one.provenance() == four.provenance()
    assert 'workers' not in one.provenance()
    assert one.provenance()['dar']['kernel_radius'] == 9


def test_load_config_file(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text("# split 1\npred-dir = runs/pred\n--gt-dir=data/gt\n\nsigma = 2.0  # narrower\n")

    assert load_config_file(str(path)) == {'pred-dir': 'runs/pred',
                                           'gt-dir': 'data/gt',
                                           'sigma': '2.0',
                                           }


def test_load_config_file_accepts_underscore_keys(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text("pred_dir = p\ngt_dir = g\nkernel_radius = 4\n")

    settings = load_config_file(str(path))

    assert settings == {'pred-dir': 'p', 'gt-dir': 'g', 'kernel-radius': '4'}
    assert EvalConfig.from_mapping(settings).dar.kernel.radius == 4


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / 'missing.cfg'))

    path = tmp_path / 'bad.cfg'
    path.write_text("pred-dir\n")
    with pytest.raises(ConfigError):
        load_config_file(str(path))
