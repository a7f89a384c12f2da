import json
import logging
from logging import getLogger
import sys
from typing import Any, Dict, List, Optional

from docopt import DocoptExit, docopt

from uhdbell import __version__
from uhdbell.core.bell import CHResult
from uhdbell.core.config import RunConfig
from uhdbell.core.detection import CountDistribution, pi_s, \
    visibility_to_xi, xi_to_visibility
from uhdbell.core.fockoracle import TruncationError
from uhdbell.core.optimize import maximize_ch
from uhdbell.core.ordering import QuadratureError
from uhdbell.core.sweep import NoSignChangeError, SweepGrid, \
    ThresholdResult, export_grid, find_eta_threshold, sweep_ch
from uhdbell.core.validators import DomainError, ValidationError
from uhdbell.core.verify import run_suites

logger = getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4

HELP = """
'uhdbell' evaluates Bell tests with unbalanced homodyne detection:
it maximizes the Clauser-Horne combination over the probe
displacements, sweeps it over detector efficiency and mode matching,
searches efficiency thresholds and checks the closed forms against a
photon-number-basis computation.

Usage:
  {p} -h
  {p} --version
  {p} ch-optimize [-d] [-c <file>] [--seed=<seed>] [-o <file>]\
 [options]
  {p} sweep [-d] [-c <file>] [--seed=<seed>] [-o <file>]\
 [options]
  {p} threshold [-d] [-c <file>] [--seed=<seed>] [-o <file>]\
 [options]
  {p} verify [-d] [-c <file>] [--seed=<seed>] [-o <file>]\
 [--suite=<suite>...]
  {p} pi-s [-d] <csvfile> [--s=<s>]
  {p} visibility [-d] (--from-xi=<xi> | --from-visibility=<v>)

Options:
  -h --help              Show this help.
  --version              Show the version.
  -d --debug             Show debug messages.
  -c, --config=<file>    Run configuration (JSON); options override it.
  --state=<state>        State: single-photon or tmsv.
  --r=<r>                Squeezing of tmsv; ch-optimize keeps it fixed
                         when given, otherwise it is optimized.
  --eta=<eta>            Overall efficiency in (0, 1] (default 1).
  --xi=<xi>              Mode matching in (0, 1] (default 1).
  --pdark=<pdark>        Probability of no dark count (default 1).
  --restarts=<n>         Random simplex starts per point (default 32).
  --max-iters=<n>        Iteration limit per simplex run (default 5000).
  --seed=<seed>          Base random seed (default 0).
  --resolution=<n>       Grid points per axis (default 50).
  --eta-range=<lo,hi>    Efficiency axis (default 0.02,1).
  --xi-range=<lo,hi>     Mode matching axis (default 0.02,1).
  --tol=<tol>            Threshold bisection tolerance (default 0.001).
  --warm-start           Seed sweep cells with the left neighbour.
  --format=<fmt>         Sweep output: csv or json (default csv).
  --offset=<offset>      Violation contour offset (default 0.001).
  -o, --output=<file>    Output file (default: standard output).
  -w, --workers=<n>      Worker processes (default: $UHDBELL_WORKERS or 1).
  --suite=<suite>        oracle, factorization, transform, lhv or
                         properties; repeatable (default: all).
  --s=<s>                Ordering of the count sum, s <= 0 (default -1).
  --from-xi=<xi>         Print the visibility for mode matching xi.
  --from-visibility=<v>  Print the mode matching for visibility v.

Examples:

- Best CH value of the single photon with perfect detectors

  python -m uhdbell ch-optimize --state single-photon

- Efficiency threshold of the two-mode squeezed vacuum

  python -m uhdbell threshold --state tmsv --xi 1 --pdark 1

- CH over a 10 x 10 grid, saved as CSV

  python -m uhdbell sweep --state single-photon --resolution 10 -o ch.csv

Exit status is 0 on success, 2 on usage or configuration errors,
3 when an argument is outside the physical domain and 4 when a
verification suite fails.
""".format(p='uhdbell')

_OVERRIDES = {
    "--state": "state",
    "--r": "r",
    "--eta": "eta",
    "--xi": "xi",
    "--pdark": "pdark",
    "--restarts": "restarts",
    "--max-iters": "max_iters",
    "--seed": "seed",
    "--resolution": "resolution",
    "--eta-range": "eta_range",
    "--xi-range": "xi_range",
    "--tol": "tol",
    "--format": "format",
    "--offset": "contour_offset",
    "--output": "output",
    "--workers": "workers",
}


def build_config(args: Dict[str, Any]) -> RunConfig:
    """
    The configuration file (if any) with the command line options
    applied on top.
    """
    if args.get("--config"):
        config = RunConfig.from_file(args["--config"])
    else:
        config = RunConfig.create()

    overrides = {key: args.get(option)
                 for option, key in _OVERRIDES.items()}
    if args.get("--warm-start"):
        overrides["warm_start"] = True
    if args.get("--suite"):
        overrides["suites"] = ",".join(args["--suite"])
    if overrides.get("output") is not None and \
            overrides["output"].lower() in ("-", "stdout"):
        overrides["output"] = None

    return config.merge(overrides)


def write_output(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("Wrote '{}'.".format(path))


def _json(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def cmd_ch_optimize(config: RunConfig) -> CHResult:
    """
    Maximizes CH at the configured point and writes the result as JSON.
    """
    state = config.state()
    optimize_r = state.has_squeezing and config["r"] is None
    result = maximize_ch(
        state, config.setup(), config.simplex(),
        optimize_r=optimize_r, workers=config["workers"])
    logger.info("Maximal violation {!r} at CH = {!r} (converged={}).".format(
        result.value, result.ch, result.converged))

    document = result.to_dict()
    document["config"] = config.to_dict()
    write_output(_json(document), config["output"])
    return result


def cmd_sweep(config: RunConfig) -> SweepGrid:
    """
    Maximizes CH on the configured grid and exports it.
    """
    grid = sweep_ch(
        config.state(),
        eta_range=config["eta_range"],
        xi_range=config["xi_range"],
        resolution=config["resolution"],
        p_dark=config["pdark"],
        cfg=config.simplex(),
        workers=config["workers"],
        warm_start=config["warm_start"])
    data = export_grid(
        grid, format=config["format"],
        contour_offset=config["contour_offset"],
        config=config.to_dict())
    write_output(data.decode("utf-8"), config["output"])
    return grid


def cmd_threshold(config: RunConfig) -> ThresholdResult:
    """
    Searches the efficiency at which CH_max turns positive.
    """
    result = find_eta_threshold(
        config.state(), xi=config["xi"], p_dark=config["pdark"],
        tol=config["tol"], cfg=config.simplex(),
        workers=config["workers"])

    document = result.to_dict()
    document["config"] = config.to_dict()
    write_output(_json(document), config["output"])
    return result


def cmd_verify(config: RunConfig) -> bool:
    """
    Runs the verification suites; returns True when all of them pass.
    """
    results = run_suites(config["suites"], seed=config["seed"])
    passed = all(r.passed for r in results)
    document = {
        "passed": passed,
        "suites": [r.to_dict() for r in results],
        "config": config.to_dict(),
    }
    write_output(_json(document), config["output"])
    return passed


def cmd_pi_s(path: str, s) -> float:
    config = RunConfig.create({"s": s})
    counts = CountDistribution.from_csv(path)
    value = pi_s(counts, config["s"])
    write_output("{!r}\n".format(value), None)
    return value


def cmd_visibility(args: Dict[str, Any]) -> float:
    if args["--from-xi"] is not None:
        value = xi_to_visibility(float(args["--from-xi"]))
    else:
        value = visibility_to_xi(float(args["--from-visibility"]))
    write_output("{!r}\n".format(value), None)
    return value


def dispatch(args: Dict[str, Any]) -> int:
    if args["pi-s"]:
        cmd_pi_s(args["<csvfile>"], args["--s"])
        return EXIT_OK

    if args["visibility"]:
        cmd_visibility(args)
        return EXIT_OK

    config = build_config(args)
    logger.debug("Effective configuration: {}".format(config.to_dict()))
    if args["ch-optimize"]:
        cmd_ch_optimize(config)
    elif args["sweep"]:
        cmd_sweep(config)
    elif args["threshold"]:
        cmd_threshold(config)
    elif args["verify"]:
        if not cmd_verify(config):
            logger.error("Verification failed.")
            return EXIT_VERIFY

    return EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    """
    Runs the command line and returns the exit status.
    """
    try:
        args = docopt(HELP, argv=argv, version=__version__)
    except DocoptExit as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit:
        # --help and --version
        return EXIT_OK

    if args['--debug']:
        log_level = logging.DEBUG
    else:
        log_level = logging.INFO

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s:%(levelname)s:%(module)s:%(lineno)d:%(message)s')

    logger.debug(args)

    try:
        return dispatch(args)
    except ValidationError as e:
        logger.error("Invalid configuration: {}".format(e))
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as e:
        logger.error("Cannot read or write a file: {}".format(e))
        return EXIT_USAGE
    except (DomainError, NoSignChangeError, TruncationError,
            QuadratureError, ValueError) as e:
        logger.error(str(e))
        return EXIT_DOMAIN


def main():
    sys.exit(run())
