#! /usr/bin/env python3
# coding=utf-8
"""
plots of the CSV outputs: energy sweeps of ``expand`` and descent traces of
``minimize``

    python3 plot_results.py output/s3_expand_sweep.csv
    python3 plot_results.py output/flat_min_minimize_trace.csv
"""

import matplotlib
matplotlib.use('Agg')
import numpy as np
import matplotlib.pyplot as plt

import argparse
import os

parser = argparse.ArgumentParser(description='Plot willmoreLab sweeps and descent traces')
parser.add_argument('file', help='path of the csv file')
parser.add_argument('--subfolder', default='', help='subfolder of plots/')
args = parser.parse_args()

if args.subfolder == '':
    savepath = 'plots/'
else:
    savepath = 'plots/{}/'.format(args.subfolder)
if not os.path.isdir(savepath):
    os.makedirs(savepath)

data = np.genfromtxt(args.file, delimiter=',', names=True)
stem = os.path.splitext(os.path.basename(args.file))[0]


def style(ax):
    ax.yaxis.set_minor_locator(matplotlib.ticker.AutoMinorLocator())
    ax.xaxis.set_minor_locator(matplotlib.ticker.AutoMinorLocator())
    ax.tick_params(axis='both', which='both', right=True, top=True)
    ax.tick_params(axis='both', which='major', labelsize=12, width=2, length=5)
    ax.tick_params(axis='both', which='minor', width=1.5, length=3)


if 'r' in data.dtype.names:
    r, W = data['r'], data['W']
    # least squares of W - 8π = c2 r² as in the sweep
    c2 = np.sum((W - 8*np.pi)*r**2)/np.sum(r**4)
    fine = np.linspace(0, r.max()*1.05, 100)
    print('c2 from the plotted sweep ', c2)

    fig, ax = plt.subplots(1, figsize=(7, 5))
    ax.plot(r, W - 8*np.pi, 'o', color='k', label='W(S_r) - 8π')
    ax.plot(fine, c2*fine**2, '-', color='tab:red', label='c2 r², c2 = {:.4f}'.format(c2))
    ax.set_xlabel('radius r', fontweight='semibold', fontsize=13)
    ax.set_ylabel('W - 8π', fontweight='semibold', fontsize=13)
    ax.legend(fontsize=11)
    style(ax)
elif 'iteration' in data.dtype.names:
    fig, axes = plt.subplots(3, sharex=True, figsize=(7, 8))
    it = data['iteration']
    axes[0].plot(it, data['W'] - 8*np.pi, '-o', ms=3, color='k')
    axes[0].set_ylabel('W - 8π', fontweight='semibold', fontsize=13)
    axes[1].semilogy(it, data['gradient_norm'], '-o', ms=3, color='tab:blue')
    axes[1].set_ylabel('|∇W - λ∇A|', fontweight='semibold', fontsize=13)
    for k, c in zip('xyz', ('tab:red', 'tab:green', 'tab:purple')):
        axes[2].plot(it, data['center_' + k], '-', color=c, label=k)
    axes[2].set_ylabel('center', fontweight='semibold', fontsize=13)
    axes[2].set_xlabel('iteration', fontweight='semibold', fontsize=13)
    axes[2].legend(fontsize=11)
    for ax in axes:
        style(ax)
else:
    raise ValueError('{} is neither a sweep nor a trace'.format(args.file))

fig.tight_layout()
savename = savepath + stem + '.png'
fig.savefig(savename, dpi=200)
print('saved ', savename)
