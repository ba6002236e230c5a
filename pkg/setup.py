#! /usr/bin/env python3
# coding=utf-8

from setuptools import setup

with open('requirements.txt') as f:
    requirements = [l.strip() for l in f if l.strip() and 'pytest' not in l]

setup(
    name='willmoreLab',
    version='0.1.0',
    description='numerical laboratory for Willmore and Willmore-type surfaces',
    packages=['willmoreLab'],
    install_requires=requirements,
    entry_points={'console_scripts': ['willmore-lab=willmoreLab.cli:main']},
)
