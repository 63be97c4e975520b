# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import print_function

# To use a consistent encoding
from os import path

# Always prefer setuptools over distutils
from setuptools import find_packages, setup

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='dndelab',

    # Versions should comply with PEP440.
    version='1.0.0',

    description='Verification lab for entropy methods of the doubly nonlinear diffusion equation',
    long_description=long_description,
    long_description_content_type='text/markdown',

    license='Apache-2.0',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',

        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    keywords='nonlinear diffusion p-laplacian entropy barenblatt sobolev gagliardo-nirenberg',

    packages=find_packages(".", exclude=['docs', 'tests*', 'examples*']),
    package_dir={'': '.'},

    # app.py imports these top-level helpers
    py_modules=['utils', 'logs'],

    install_requires=[
        'numpy>=1.22', 'scipy>=1.8', 'pydantic>=2.0.0', 'tinydb', 'pytest',
    ],

    extras_require={},

    package_data={},

    scripts=[
        "app.py",
    ]
)
