"""Shape classification from interval-valued triangle features of pruned skeletons.

A binary mask is thinned to a one-pixel skeleton, the skeleton is pruned
against a simplified boundary polygon, its endpoints and junctions are
triangulated, each triangle becomes a canonical row of side lengths and
angles, a sample's rows are assimilated into six [min, max] intervals, and
classification votes by counting how many crisp test features fall inside
the stored intervals.
"""

from .classifier import (
    ClassificationResult,
    EvaluationReport,
    IntervalVotingClassifier,
    Knowledgebase,
    ReferenceVector,
    acceptance_count,
    classify,
    evaluate,
    train,
)
from .corpus import Corpus, ingest
from .errors import (
    AllCollinear,
    BadSpec,
    DataError,
    DegenerateShape,
    DegenerateTriangle,
    EmptyClass,
    EmptyInput,
    EmptyMask,
    EmptyMatrix,
    EmptyTestSet,
    EmptyTrainingSet,
    InvariantViolation,
    NoClasses,
    NoValidTriangles,
    SplitInfeasible,
    StageError,
    TargetTooSmall,
    TooFewPoints,
    TriskelError,
    UnusableSample,
)
from .evaluation import (
    CorpusFeatures,
    TrialPlan,
    extract_corpus_features,
    run_evaluation,
    stratified_split,
)
from .features import (
    FeatureMatrix,
    Interval,
    IntervalVector,
    TriangleFeatures,
    assimilate,
    sample_features,
    triangle_features,
)
from .geometry import (
    EPS_AREA,
    EPS_DUP,
    EPS_INCIRCLE,
    Point2D,
    Triangle,
    Triangulation,
    circumcircle,
    circumcircle_contains,
    convex_hull,
    delaunay,
)
from .pipeline import (
    MaskFeaturizer,
    PipelineConfig,
    run_pipeline,
    run_pipeline_mask,
)
from .raster import BinaryRaster, read_mask, write_pgm
from .skeleton import (
    Polygon,
    SkeletonPoints,
    boundary_polygon,
    dce_simplify,
    detect_points,
    largest_component,
    prune_skeleton,
    thin,
)
from .synth import make_shape, standard_corpus, synth_corpus

__version__ = "0.1.0"
