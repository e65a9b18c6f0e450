#!/usr/bin/env python

from setuptools import setup, find_packages

# get version number
exec(compile(open('nas_evo/__init__.py', "rb").read(),
             'nas_evo/__init__.py',
             'exec'))

setup(name='nas_evo',
      version=__version__,
      description='Diversity initialized, cost constrained evolutionary '
                  'neural architecture search on synthetic and tabular '
                  'fitness oracles',
      packages=find_packages(exclude=['tests', 'tests.*']),
      install_requires=['numpy', 'click', 'pyyaml', 'scipy',
                        ],
      extras_require={'test': ['pytest']},
      entry_points={
          'console_scripts': ['nas-evo=nas_evo.study.cli:main'],
      },
      )
