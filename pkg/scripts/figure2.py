"""Two-armed Gaussian bandits: shifted means (left) and growing variance (right)."""
from _common import parser, run_presets

if __name__ == "__main__":
    p = parser(__doc__)
    p.add_argument("--panel", choices=("shift", "scale", "both"), default="both")
    args = p.parse_args()
    panels = ["shift", "scale"] if args.panel == "both" else [args.panel]
    run_presets([f"figure2-{x}" for x in panels], args)
