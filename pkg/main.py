"""
Penalised Intensity Estimation System - Main Entry Point

Workflow (one subcommand per stage):
1. simulate : draw replicates of a scenario or preset
2. localk   : local K-functions of a pattern
3. phistar  : interaction weights phi* and their offset surface
4. fit      : Poisson fit with an optional phi* offset
5. gof      : Pearson quadrat statistic of a fitted intensity
6. study    : paired replication study (MISE or chi2)
7. report   : four-model comparison (AIC, offsets, residuals, figures)

Exit codes:
    0 success, 1 unexpected error, 2 configuration error,
    3 data error, 4 numerical failure
"""
import argparse
import io
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.config import OFFSET_CHOICES, Config, RunConfig
from src.enums import EdgeCorrection, MetricKind, OutputFormat
from src.errors import IntensityError
from src.pipeline_service import cmd_pipeline

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
CONFIGURATION_EXIT = 2


# =============================================================================
# Argument groups
# =============================================================================

def _add_common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('global options')
    group.add_argument('--config', type=str, help='YAML config file (default: config.yaml if present)')
    group.add_argument('--seed', type=int, help='Base seed (default: 0)')
    group.add_argument('--threads', type=int, help='Worker processes (env: PENALISED_INTENSITY_THREADS)')
    group.add_argument('--format', choices=[f.value for f in OutputFormat], help='Tabular output format')
    group.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level')
    group.add_argument('--quiet', action='store_true', help='Suppress progress output')


def _add_pattern(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--pattern', type=str, help='Pattern CSV with header x,y')
    parser.add_argument('--window', type=str, help='Window JSON (default: <pattern>.window.json)')


def _add_estimation(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('interaction weights')
    group.add_argument('--radius-count', type=int, help='Number of radii (default: 100)')
    group.add_argument('--r-max', type=float, help='Largest radius (default: shorter side / 4)')
    group.add_argument('--r0', type=float, help='Smallest radius (default: r_max / 100)')
    group.add_argument('--discrepancy', type=str,
                       help='exp_normalized | exp_squared | uniform | l2 (default: exp_normalized)')
    group.add_argument('--exponent', type=float, help='Exponent of the normalised discrepancy (default: 2)')
    group.add_argument('--signed', action='store_true', help='Signed normalised discrepancy')
    group.add_argument('--interpolation', type=str, help='indicator | idw | kernel (default: idw)')
    group.add_argument('--idw-power', type=float, help='IDW power (default: 2)')
    group.add_argument('--bandwidth', type=float, help='Kernel smoother bandwidth (default: LSCV)')
    group = parser.add_argument_group('fitting')
    group.add_argument('--dummy-grid', type=int, help='Dummy points per side (default: 64, 100 if n > 500)')
    group.add_argument('--max-iterations', type=int, help='Newton iteration cap (default: 100)')
    group.add_argument('--nx', type=int, help='Raster columns (default: 128)')
    group.add_argument('--ny', type=int, help='Raster rows (default: 128)')


def _add_quadrats(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--quadrat-rows', type=int, help='Quadrat rows (default: 5)')
    parser.add_argument('--quadrat-cols', type=int, help='Quadrat columns (default: 5)')


def _add_scenario(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--scenario', type=str, help='Scenario JSON (family, parameters, window, seed)')
    parser.add_argument('--preset', type=str, help='Named scenario preset, e.g. thomas_1')
    parser.add_argument('--replicates', type=int, help='Number of replicates')


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='Penalised Intensity Estimation System',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py simulate --preset thomas_1 --replicates 10 --out sims/
  python main.py localk --pattern sims/rep_0001.csv --out localk.json
  python main.py phistar --pattern data/redwoodfull.csv --interpolation kernel --out phistar/
  python main.py fit --pattern sims/rep_0001.csv --covariate x --offset idw --out fit.json
  python main.py gof --pattern sims/rep_0001.csv --fitted fitted.surface --out chi2.json
  python main.py study --preset lgcp_homog_125 --replicates 50 --metric mise --out report.json
  python main.py report --pattern data/redwoodfull.csv --out redwood/
"""
    )
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    simulate = subparsers.add_parser('simulate', help='Simulate replicates of a scenario')
    _add_scenario(simulate)
    simulate.add_argument('--out', type=str, help='Output directory')

    localk = subparsers.add_parser('localk', help='Local and global K-functions')
    _add_pattern(localk)
    _add_estimation(localk)
    localk.add_argument('--out', type=str, help='Output JSON')

    phistar = subparsers.add_parser('phistar', help='phi* marks and offset surface')
    _add_pattern(phistar)
    _add_estimation(phistar)
    phistar.add_argument('--marks', type=str, help='Reuse marks CSV (x,y,phi_star)')
    phistar.add_argument('--out', type=str, help='Output directory')

    fit = subparsers.add_parser('fit', help='Fit a (penalised) Poisson model')
    _add_pattern(fit)
    _add_estimation(fit)
    fit.add_argument('--covariate', action='append', metavar='NAME[=PATH]',
                     help='Covariate surface file, or x, y, x2, y2 (repeatable)')
    fit.add_argument('--offset', choices=OFFSET_CHOICES, help='Offset method (default: none)')
    fit.add_argument('--offset-surface', type=str, help='Explicit offset surface file')
    fit.add_argument('--marks', type=str, help='Reuse marks CSV (x,y,phi_star)')
    fit.add_argument('--fitted', type=str, help='Also write the fitted intensity surface here')
    fit.add_argument('--out', type=str, help='Output JSON')

    gof = subparsers.add_parser('gof', help='Pearson quadrat statistic')
    _add_pattern(gof)
    _add_quadrats(gof)
    gof.add_argument('--fitted', type=str, help='Fitted intensity surface file')
    gof.add_argument('--out', type=str, help='Output JSON')

    study = subparsers.add_parser('study', help='Paired replication study')
    _add_scenario(study)
    _add_estimation(study)
    _add_quadrats(study)
    study.add_argument('--metric', choices=[m.value for m in MetricKind], help='mise or chi2')
    study.add_argument('--methods', type=str, help='Comma-separated subset of none,I,IDW,KS')
    study.add_argument('--out', type=str, help='Output JSON')

    report = subparsers.add_parser('report', help='Four-model comparison with figures')
    _add_pattern(report)
    _add_estimation(report)
    report.add_argument('--covariate', action='append', metavar='NAME[=PATH]',
                        help='Covariate surface file, or x, y, x2, y2 (repeatable)')
    report.add_argument('--residual-bandwidth', type=float, help='Residual smoothing bandwidth')
    report.add_argument('--intensity-bandwidth', type=float, help='Kernel intensity bandwidth')
    report.add_argument('--edge-correction', choices=[e.value for e in EdgeCorrection])
    report.add_argument('--out', type=str, help='Output directory')

    for sub in subparsers.choices.values():
        _add_common(sub)
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Process exit code
    """
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level or 'INFO'), format=LOG_FORMAT)

    try:
        config = Config(args.config)
        run_config = RunConfig.from_sources(args, config)
        logging.getLogger().setLevel(getattr(logging, run_config.runtime.log_level.upper(), logging.INFO))
        return cmd_pipeline(run_config, quiet=args.quiet)
    except IntensityError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except (FileNotFoundError, ValidationError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return CONFIGURATION_EXIT
    except Exception as e:
        logger.exception("Unexpected error")
        print(f"❌ {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    # Fix console encoding for Windows
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.exit(main())
