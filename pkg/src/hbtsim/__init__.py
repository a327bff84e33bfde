"""hbtsim: desk-scale Hanbury Brown-Twiss photon-correlation simulator.

Generates photon time-tag streams from classical models of multimode laser
light, runs them through a simulated beamsplitter/detector bench, estimates
the three second-order correlation kinds (total-beam auto, single-mode
auto, all-to-one cross), and extracts the damped-oscillation parameters and
nonclassicality witnesses used to contrast semiclassical predictions with
the observed anticorrelation phenomenology.
"""

from ._kernels import BACKEND
from .analysis import (
    FitResult,
    PeakStats,
    WitnessCurve,
    antiphase_score,
    cs_witness,
    fit_damped_oscillation,
    peak_stats,
)
from .correlator import (
    Correlogram,
    CorrelogramSpec,
    correlate,
    correlate_brute,
    read_correlogram_csv,
    write_correlogram_csv,
)
from .optics import DetectorModel, attenuate, delay, detect, relabel, split
from .scenarios import (
    ScenarioConfig,
    builtin_scenario,
    builtin_scenarios,
    load_scenario,
    run_scenario,
)
from .sources import (
    Chaotic,
    Coherent,
    CorrelatedPair,
    IntensityTrace,
    LogGaussianCox,
    Modulated,
    PulseTrainMultimode,
    analytic_g2,
    photonize,
    sample_intensity,
    sample_photons,
)
from .tags import TagStream, TimeTag, merge, read_stream, read_stream_csv, write_stream, write_stream_csv

__version__ = "0.1.0"
