"""
Usage:
python derham.py cone-threshold --scene params/cone_threshold_111.yaml
python derham.py periods --scene params/periods_annulus.yaml --out runs/annulus
"""
import sys

from lpderham.cli import main

if __name__ == '__main__':
    sys.exit(main())
