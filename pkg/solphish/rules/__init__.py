"""
Detection Rules

The prerequisite filter, the STMT/AAT/ISA predicates, the vanity
matcher and the classifier that turns transactions into Detections.
"""

from .classifier import ClassificationRun, RuleSet, classify, classify_all
from .detection import (
    SCHEMA_VERSION,
    Detection,
    PhishType,
    read_detections,
    write_detections,
)
from .detectors import (
    VANITY_PREFIX,
    VANITY_SUFFIX,
    detect_aat,
    detect_isa,
    detect_stmt,
    match_vanity,
    vanity_branch,
)
from .errors import DetectionFormatError, ListFileError
from .lists import (
    MarketList,
    OfficialAllowlist,
    default_official_allowlist,
    load_address_list,
    load_market_list,
    load_official_allowlist,
)
from .prerequisites import PASS, PrerequisiteResult, RejectReason, check_prerequisites

__all__ = [
    'ClassificationRun', 'RuleSet', 'classify', 'classify_all',
    'SCHEMA_VERSION', 'Detection', 'PhishType', 'read_detections', 'write_detections',
    'VANITY_PREFIX', 'VANITY_SUFFIX', 'detect_aat', 'detect_isa', 'detect_stmt',
    'match_vanity', 'vanity_branch',
    'DetectionFormatError', 'ListFileError',
    'MarketList', 'OfficialAllowlist', 'default_official_allowlist', 'load_address_list',
    'load_market_list', 'load_official_allowlist',
    'PASS', 'PrerequisiteResult', 'RejectReason', 'check_prerequisites',
]
