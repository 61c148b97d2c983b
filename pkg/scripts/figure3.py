"""Ten-armed bandits with Gaussian, shifted-exponential and logistic rewards."""
from _common import parser, run_presets

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--family", choices=("gaussian", "exponential", "logistic", "all"), default="all")
    args = p.parse_args()
    fams = ["gaussian", "exponential", "logistic"] if args.family == "all" else [args.family]
    run_presets([f"figure3-{f}" for f in fams], args)
