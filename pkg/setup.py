#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import find_packages
from setuptools import setup

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = [
    'numpy>=1.17',
    'scipy>=1.3',
]

test_requirements = [
    'pytest',
    'mock',
]

setup(
    name='movae',
    version='0.9.0.0',
    description="Mixture of variational autoencoders for one-shot "
                "classification",
    long_description=readme + '\n\n' + history,
    author="Cisco Ucs",
    author_email='ucs-python@cisco.com',
    url='https://github.com/ciscoucs/movae',
    packages=find_packages(exclude=['tests', 'tests.*']),
    include_package_data=True,
    install_requires=requirements,
    license="Apache Software License 2.0",
    zip_safe=False,
    keywords='movae vae one-shot semi-supervised',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    entry_points={
        'console_scripts': [
            'movae=movae.harness.cli:main',
        ],
    },
    python_requires='>=3.8',
    tests_require=test_requirements,
    extras_require={'test': test_requirements},
)
