#! /usr/bin/env python3
# coding=utf-8
"""
run one command of the lab on a setup of ``lab_config.toml``

    python3 willmore_lab.py verify --setup torus
"""

import sys
import argparse

import willmoreLab
import willmoreLab.cli as cli

import logging
log = logging.getLogger('willmoreLab')
log.setLevel(logging.INFO)
log.addHandler(logging.StreamHandler())

parser = argparse.ArgumentParser(description='willmoreLab batch run')
parser.add_argument('command', choices=cli.COMMANDS, help='suite or experiment to run')
parser.add_argument('--config', help='TOML config file', default='lab_config.toml')
parser.add_argument('--setup', help='setup to use, e.g. torus, s3, flat_min', default=None)
parser.add_argument('--out', help='output directory', default='output')
parser.add_argument('--seed', type=int, default=None, help='seed of the random generator')
parser.add_argument('--verbose', action='store_true', help='debug output')

args = parser.parse_args()
print('willmoreLab', willmoreLab.__version__, args.command, args.setup)

argv = [args.command, '--config', args.config, '--out', args.out]
if args.setup is not None:
    argv += ['--setup', args.setup]
if args.seed is not None:
    argv += ['--seed', str(args.seed)]
if args.verbose:
    argv.append('--verbose')
sys.exit(cli.main(argv))
