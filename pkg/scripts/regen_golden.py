"""Regenerate the golden CLI outputs in tests/golden/ from configs/.

Run only after an intentional output change; the acceptance suite compares
fresh CLI output against these files byte for byte.
"""

import json
from pathlib import Path

from qfcomb import cli

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"


def main():
    manifest = json.loads((GOLDEN / "manifest.json").read_text())
    for stem, (command, fmt) in sorted(manifest.items()):
        cfg = json.loads((ROOT / "configs" / f"{stem}.json").read_text())
        data = cli.run(command, cfg, fmt)
        path = GOLDEN / f"{stem}.{fmt}"
        path.write_bytes(data)
        print(f"{path.relative_to(ROOT)}: {len(data)} bytes")


if __name__ == "__main__":
    main()
