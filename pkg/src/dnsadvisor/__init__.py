"""DNS configuration analysis: dependency graphs, smell detection and
behavior-preserving refactoring of zone files plus deployment metadata."""

from .corpus import CorpusError, CutIndex, assemble_corpus, load_corpus
from .graph import (DependencyGraph, EdgeKind, NodeKind, build_graph,
                    export_graph, find_dependency_cycles, import_graph,
                    zone_dependency_closure)
from .metrics import (administrative_complexity, server_redundancy,
                      zone_influence)
from .model import (Bailiwick, Corpus, ModelError, Organization, RecordType,
                    ResourceRecord, Server, SoaData, Zone, classify_bailiwick)
from .names import ROOT, DomainName, NameError_
from .refactor import (RULES, PreservationViolated, RefactoringError,
                       apply_rule, check_preservation, match_rule,
                       refactor_until_clean)
from .resolver import ResolutionOutcome, ResolutionStatus, resolve
from .smells import (CATALOGUE, CatalogueConfig, ConfigError, Finding,
                     Severity, findings_to_json, run_catalogue)
from .zonefile import ZoneFileError, parse_zone_file, serialize_zone

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
