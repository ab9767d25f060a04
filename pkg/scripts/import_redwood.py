"""Import the full Redwood pattern into data/redwoodfull.csv (+ window sidecar and provenance)."""
import argparse
import hashlib
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import pandas as pd  # noqa: E402

from src.core import ObservationWindow, PointPattern  # noqa: E402
from src.exporters import ArtifactExporter  # noqa: E402

EXPECTED_POINTS = 195


def _coordinates(frame: pd.DataFrame) -> pd.DataFrame:
    lower = {c.lower(): c for c in frame.columns}
    if 'x' in lower and 'y' in lower:
        return frame[[lower['x'], lower['y']]].set_axis(['x', 'y'], axis=1)
    numeric = frame.select_dtypes('number')
    if numeric.shape[1] < 2:
        raise SystemExit("❌ Source needs x,y columns or at least two numeric columns")
    # R exports often lead with a row index
    return numeric.iloc[:, -2:].set_axis(['x', 'y'], axis=1)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument('--source', required=True, help='CSV export of the redwoodfull pattern')
    parser.add_argument('--out', default='data/redwoodfull.csv')
    args = parser.parse_args()

    source = Path(args.source)
    frame = _coordinates(pd.read_csv(source)).astype(float)
    print(f'Read {len(frame)} points from {source}')
    if len(frame) != EXPECTED_POINTS:
        print(f'⚠️ Expected {EXPECTED_POINTS} points, got {len(frame)}')

    pattern = PointPattern(frame.to_numpy(), ObservationWindow.unit_square())
    out = ArtifactExporter().export_pattern(pattern, args.out)
    provenance = {
        'source': source.name,
        'sha256': hashlib.sha256(source.read_bytes()).hexdigest(),
        'points': pattern.n,
        'window': pattern.window.to_dict(),
        'scaling': 'unit square, as distributed',
    }
    out.with_name(f'{out.stem}.provenance.json').write_text(json.dumps(provenance, sort_keys=True, indent=2) + '\n')
    print(f'✅ Wrote {out}')


if __name__ == '__main__':
    main()
