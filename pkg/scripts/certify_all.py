"""Run every certificate, store the JSON under --out and replay each stored file."""
import argparse
import json
import time
from pathlib import Path

from sepcones.certificates import CERTIFICATES, certify, replay


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="certificates")
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in sorted(CERTIFICATES):
        t = time.perf_counter()
        c = certify(name)
        dt = time.perf_counter() - t
        path = out / f"{name}.json"
        path.write_text(c.dumps(pretty=True) + "\n")
        r = replay(json.loads(path.read_text()))
        ok &= c.verified and r.verified
        print(f"{name:<20} {'Verified' if c.verified else c.verdict}  replay "
              f"{'ok' if r.verified else r.verdict}  {1e3 * dt:.1f} ms  -> {path}")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
