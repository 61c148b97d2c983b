"""Reward average vs. perturbed average vs. ReBoot on a 10-armed Gaussian bandit."""
from _common import parser, run_presets

if __name__ == "__main__":
    run_presets(["figure1"], parser(__doc__).parse_args())
