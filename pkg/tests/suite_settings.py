"""Constants shared by the fixtures and the acceptance tests. Kept in a
module with a suite-unique name so it imports cleanly when several test
trees run in one pytest invocation."""

from packscope.dataset import CorpusConfig

REFERENCE_SEED = 1

SMALL_CONFIG = CorpusConfig(
    raw_counts={"code": 6, "text": 6, "mixed": 6, "sparse": 6},
    packed_counts={"A": 12, "B": 8, "C": 6},
    min_size=2048,
    max_size=8192,
)
