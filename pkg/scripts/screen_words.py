#!/usr/bin/env python3
"""Print similarity screening for the stock word pairs.

Usage: python scripts/screen_words.py [--embedding-url URL]
"""
import sys

from undercover.cli import main

raise SystemExit(main(["words", *sys.argv[1:]]))
