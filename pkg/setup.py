#!/usr/bin/env python

from setuptools import find_packages, setup

setup(name='lpderham',
      version='0.1',
      description='Experiments on L^p de Rham theory of singular spaces',
      packages=find_packages(exclude=['tests']),
      python_requires='>=3.8',
      install_requires=[
          'joblib', 'numpy', 'pandas', 'protobuf', 'PyYAML', 'scikit-learn', 'scipy', 'sympy',
          'tensorboardX', 'tqdm',
      ],
      entry_points={'console_scripts': ['derham=lpderham.cli:main']},
     )
