"""Driver torso-posture estimation from chest-worn accelerometers in moving vehicles."""

__version__ = "0.1.0"

from .core import AccelSample, AccelStream, Source, TiltAngle, magnitude, tilt_from_y
from .detector import (
    DetectorConfig,
    DetectorState,
    PostureEvent,
    detect_batch,
    detector_create,
    detector_finish,
    detector_step,
)
from .diff_estimator import ResidualMetrics, ResidualStream, residual_metrics, subtract_streams
from .errors import PostureError
from .evaluate import EvalReport, eval_events
from .filters import AlignedPair, LowPassState, lowpass_create, lowpass_step, resample_align
from .scenario import (
    GroundTruth,
    Maneuver,
    Mounting,
    Pickup,
    ScenarioKind,
    ScenarioSpec,
    SensorModel,
    render_scenario,
    render_sensor,
    synth_torso_profile,
    synth_vehicle_profile,
)
