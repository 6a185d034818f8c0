"""
Claim identifiers, exit codes and the named projection corpus
"""


class Claim:
    """Identifiers of the verified claims"""
    ROW_ADJACENCY = "wm.adjacent"
    COLUMN_BINOMIAL = "wm.binomial"
    COMPLEMENTARY_ROWS = "wm.complement"
    OU_PRODUCT = "ou.product"
    OU_PAIRS = "ou.pairs"
    GAUSS_AGREEMENT = "gauss.agree"
    THEOREM1 = "thm1"
    THEOREM1_WITNESS = "thm1.witness"
    THEOREM2 = "thm2"
    RANK_ORACLE = "rank.oracle"
    RANK_SHARDED = "rank.sharded"
    ROW_SUM = "prop4.1"
    UNIQUE_ENTRY_COLUMN = "prop4.2"
    ROW_FLIP = "cor4.3"
    INDEPENDENT_WITH_ONES = "lemma4.5"
    INCIDENCE_RANK = "cor4.6"
    THEOREM5 = "thm5.1"
    LEMMA31 = "lemma3.1"

    ALL = [
        ROW_ADJACENCY,
        COLUMN_BINOMIAL,
        COMPLEMENTARY_ROWS,
        OU_PRODUCT,
        OU_PAIRS,
        GAUSS_AGREEMENT,
        THEOREM1,
        THEOREM1_WITNESS,
        THEOREM2,
        RANK_ORACLE,
        RANK_SHARDED,
        ROW_SUM,
        UNIQUE_ENTRY_COLUMN,
        ROW_FLIP,
        INDEPENDENT_WITH_ONES,
        INCIDENCE_RANK,
        THEOREM5,
        LEMMA31,
    ]


class ExitCode:
    """Process exit codes of the CLI; stable across releases"""
    SUCCESS = 0
    VERIFICATION_FAILED = 1
    INPUT_ERROR = 2
    RESOURCE_LIMIT = 3
    DATA_ERROR = 4


class Realizability:
    """Whether a word is known to be a projection on the sphere"""
    UNCHECKED = "unchecked"


class Scope:
    CORPUS = "corpus"
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"

    ALL = [CORPUS, EXHAUSTIVE, RANDOM]


# Named projections, keyed by name; all codes are already normalized
NAMED_PROJECTIONS = {
    "curl": "1 1",
    "double-twist": "1 2 2 1",
    "interlaced": "1 2 1 2",
    "trefoil": "1 2 3 1 2 3",
    "figure-eight": "1 2 3 4 2 1 4 3",
}
