"""Top-quality and top-k planning with plan-forbidding transformations and
search-based certification of the resulting plan sets."""
from .certify import (CertificationReport, ExtendedSetSpec, MaterializationRefused, Verdict,
                      certify_dominance, certify_top_k, certify_top_quality,
                      check_definition1_oracle, materialize_extended_set)
from .errors import (ContractError, InvalidPlan, ParseError, PlanForbidden, ResourceLimitError,
                     TopCertError, UnsupportedFeatureError, UsageError)
from .planner import IterationTrace, Termination, plan_top_k, plan_top_quality
from .plans import (Plan, Relation, action_multiset, dominates, format_plan, is_loopless,
                    parse_plan_text, read_plan_file, remove_loops, validate_plan,
                    write_plan_file)
from .sas import parse_sas, serialize_sas, write_sas
from .search import (EnumerationResult, SearchOutcome, Status, enumerate_loopless,
                     enumerate_plans, optimal_search)
from .task import Action, Task, Variable, is_applicable, successor, validate_task
from .transforms import (TransformResult, extend, forbid_exact_plan, forbid_loopless,
                         forbid_set, forbid_superset, forbid_unordered, forward_map)

__version__ = "0.1.0"
