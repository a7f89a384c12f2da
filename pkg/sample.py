from logging import getLogger

from uhdbell import (
    SetupParams,
    SimplexConfig,
    StateKind,
    find_eta_threshold,
    maximize_ch,
    sweep_ch,
)
from uhdbell.core.sweep import connected_violation_region, export_grid

logger = getLogger(__name__)


if __name__ == '__main__':
    import logging
    logging.basicConfig(level=logging.INFO)

    output_path = "ch_grid.csv"

    photon = StateKind.create("single-photon")
    tmsv = StateKind.create("tmsv")

    # Best settings with perfect detectors
    result = maximize_ch(photon, SetupParams())
    logger.info("single photon: violation {:.4f} (CH={:.4f}) at {}".format(
        result.value, result.ch, result.settings))

    result = maximize_ch(tmsv, SetupParams())
    logger.info("tmsv: violation {:.4f} at r={:.3f}".format(
        result.value, result.settings.r))

    # Efficiency needed for a violation with perfect mode matching
    for state in (photon, tmsv):
        threshold = find_eta_threshold(state, xi=1.0, p_dark=1.0)
        logger.info("{}: efficiency threshold {:.3f}".format(
            state, threshold.eta_threshold))

    # Coarse map of the violation region
    grid = sweep_ch(
        photon, eta_range=(0.5, 1.0), xi_range=(0.5, 1.0), resolution=11,
        p_dark=0.99, cfg=SimplexConfig(restarts=8), warm_start=True)
    region = connected_violation_region(grid)
    logger.info("{} of {} cells violate the CH inequality.".format(
        int(region.sum()), region.size))

    with open(output_path, "wb") as f:
        f.write(export_grid(grid))
