"""
run_pipeline.py — CLI entry point.

Thin wrapper around src.cli so the pipeline runs from the repository root:

    python run_pipeline.py gen-synthetic --output output
    python run_pipeline.py train --train output/synthetic_train.conll
    python run_pipeline.py parse --input output/synthetic_test.conll
    python run_pipeline.py evaluate --gold output/synthetic_test.conll --predicted output/predicted.conll

See docs/REPRODUCING.md for the full command sequence.
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
