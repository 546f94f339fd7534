"""Radar measurement of seated people's body movements with a pair of MIMO radars."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    Cell,
    ComplexImageSequence,
    ConfigError,
    DataCube,
    DisplacementTrace,
    MovementTrace,
    PowerImage,
    RadarConfig,
    SeatRegion,
    TargetTrack,
    segment_bounds,
    validate_config,
)
from .imaging import (  # noqa: E402
    TaylorWindow,
    beamform,
    power_image,
    steering_weights,
    suppress_clutter,
    taylor_window,
)
from .localization import build_track, locate_global, locate_in_regions  # noqa: E402
from .motion import extract_displacement, movement_index, unwrap_phase  # noqa: E402
from .analytics import (  # noqa: E402
    AssociationReport,
    CorrelationMatrixSequence,
    ScoreTable,
    association_accuracy,
    correlation_matrices,
    normalize_scores,
    normalize_totals,
    objective_index,
    pearson,
    segment_correlation,
)
from .simulator import (  # noqa: E402
    Motion,
    RadarPose,
    Scatterer,
    SceneSpec,
    classroom_scene,
    project_los,
    seat_regions,
    simulate,
    synth_waveform,
)
from .pipeline import RadarResult, process_cube  # noqa: E402
