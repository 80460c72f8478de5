#!/usr/bin/env python

from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()
with open(path.join(here, 'cgleval/__init__.py'), encoding='utf-8') as f:
    __version__ = f.readline().split('"')[1]

install_requires = [
    'numpy>=1.17',
    'scipy>=1.4',
    'Pillow>=7.0',
    'gevent>=1.3.0',
    'gevent-eventemitter>=2.1',
]

setup(
    name='cgleval',
    version=__version__,
    description='Segmentation evaluation with IoU and Dimension-agnostic Recall',
    long_description=long_description,
    author="Rossen Georgiev",
    author_email='rossen@rgp.io',
    license='MIT',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Topic :: Scientific/Engineering :: Image Recognition',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ],
    keywords='segmentation evaluation miou iou recall cgl covert geo-location attention',
    packages=['cgleval'] + ['cgleval.'+x for x in find_packages(where='cgleval')],
    install_requires=install_requires,
    extras_require={
        'tests': ['pytest>=6.0'],
    },
    entry_points={
        'console_scripts': ['cgleval = cgleval.cli:main'],
    },
    python_requires='>=3.7',
    zip_safe=True,
)
