"""dialkit: procedural dial synthesis, alignment kernels, and readout evaluation.

The toolkit factorizes dial images into a physical state (clock time or
calibrated gauge value) and an appearance condition (viewpoint, lighting,
glare, blur), generates controlled benchmarks and training relations on top
of that factorization, and scores predictions and embedding spaces against
state-aware protocols.
"""

from .alignment import (
    MarginSchedule,
    RewardConfig,
    combined_reward,
    format_reward,
    group_normalize,
    margin_for_gap,
    state_reward,
    triplet_loss,
    warmup_weight,
)
from .datasets import (
    BenchmarkConfig,
    GroundedTarget,
    SampleRecord,
    Triplet,
    TripletConfig,
    generate_benchmark,
    generate_pairs,
    generate_triplets,
    read_manifest,
    render_record,
    render_record_from_header,
    sample_neighbor_pair,
    sample_same_state_pair,
    sample_triplet,
    sft_target,
    write_manifest,
    write_sft_targets,
)
from .evaluation import (
    degradation_curve,
    emit_report,
    evaluate,
    parse_prediction,
    read_predictions,
)
from .probes import (
    compactness_separability,
    pca_project,
    probe_report,
    read_embeddings,
    recall_at_1,
    silhouette,
)
from .render import (
    SPLITS,
    AppearanceCondition,
    Palette,
    StyleConfig,
    apply_appearance,
    render_dial_face,
    render_sample,
    sample_appearance,
    style_from_seed,
)
from .states import (
    CLOCK_CYCLE_MINUTES,
    DEFAULT_GAUGE_CALIBRATION,
    ClockState,
    DialState,
    GaugeCalibration,
    GaugeState,
    clock_distance,
    clock_from_minutes,
    clock_hand_angles,
    clock_state_to_minutes,
    format_clock,
    format_gauge_value,
    gauge_distance,
    gauge_value_to_angle,
    parse_clock_text,
    state_distance_normalized,
)

__version__ = "0.1.0"
