# -*- coding: utf-8 -*-
#
# Sphinx configuration for cgleval

import sys
import os
sys.path.insert(0, os.path.abspath('../'))

from cgleval import __version__, __author__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
]

source_suffix = '.rst'
master_doc = 'index'

project = u'cgleval'
copyright = u'2020, %s' % __author__
author = __author__
version = __version__
release = __version__

language = 'en'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'cglevaldoc'

man_pages = [
    (master_doc, 'cgleval', u'cgleval Documentation', [author], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'gevent': ('http://www.gevent.org', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    }

autodoc_member_order = 'bysource'
