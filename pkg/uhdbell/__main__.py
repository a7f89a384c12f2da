#!/usr/bin/env python

"""
Runs when invoked as ``python -m uhdbell``.
"""

from uhdbell.cli import main

if __name__ == '__main__':
    main()
