"""Painting-language knowledge-graph annotation toolkit.

Library surface: schema loading and validation, annotation records with
rule checking and normalization, image feature extraction with label
suggestions, inter-annotator agreement, a file-backed workspace and an
HTTP API over it.
"""

from .agreement import (
    AgreementReport,
    NodeAgreement,
    cohen_kappa,
    percent_agreement,
    union_node_set,
)
from .annotation import (
    SPATIAL_RELATIONS,
    Annotation,
    LabelAssignment,
    NarrativeSegment,
    Region,
    SpatialRelation,
    load_bundled_examples,
    merge_annotations,
    normalize_annotation,
    parse_annotation,
    records_to_jsonl,
    serialize_annotation,
    to_training_records,
    validate_annotation,
)
from .errors import (
    AllParallel,
    BandsExceedHeight,
    BindError,
    CorruptIndex,
    DegeneratePath,
    ImageTooSmall,
    InvalidAnnotation,
    MisalignedCorpora,
    MixedImages,
    MixedSchemaVersions,
    NoSchema,
    ParseError,
    PlkgError,
    RevisionConflict,
    SchemaMismatch,
    StructureError,
    UnknownNode,
    UnknownRuleNode,
    ValidationFailed,
)
from .features import (
    CONSTANTS,
    CONSTANTS_VERSION,
    Suggestion,
    VanishingPoint,
    extract_all,
    fill_ratio,
    golden_point_min_distance,
    hard_edge_fraction,
    luminance_stats,
    negative_space_ratio,
    s_curve_coverage,
    saturation_stats,
    suggest_labels,
    symmetry_score,
    tonal_key,
    vanishing_point,
    warm_cold_gradient,
)
from .reporting import Finding, ValidationReport
from .rules import evaluate_rules, exclusive_conflicts
from .schema import (
    ConsistencyRule,
    MeasurableCriterion,
    Schema,
    SchemaDiff,
    SchemaNode,
    check_ruleset,
    descendants,
    diff_schemas,
    find_nodes,
    load_bundled_schema,
    load_schema,
    load_schema_file,
    parse_schema,
    path_to_root,
    serialize_schema,
    validate_schema,
)
from .store import Workspace, init_workspace, open_workspace

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
