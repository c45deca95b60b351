"""Bundled English stopword list for the offline query-curation fallback.

Fixed and versioned: changing the list changes every fallback query, so
additions require a version bump. Beyond the usual English function words
it drops the how-do-I boilerplate of question titles (question words,
auxiliaries, generic task verbs) that carries no search signal.
"""

STOPWORDS_VERSION = "1"

STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are aren as at
    be because been before being below between both but by
    can cannot cant could couldn
    d did didn do does doesn doing don down during
    each
    few for from further
    get gets getting got
    had hadn has hasn have haven having he her here hers herself him
    himself his how
    i if in into is isn it its itself
    just
    ll
    m ma make makes making may me might mightn more most must mustn my
    myself
    need needn needs no nor not now
    o of off on once only onto or other our ours ourselves out over own
    perform performed performing performs please properly
    re
    s same shan she should shouldn so some such
    t than that the their theirs them themselves then there these they
    this those through to too
    under until up use used uses using
    ve very
    want wanted wants was wasn way ways we were weren what when where
    which while who whom why will with won would wouldn
    y you your yours yourself yourselves
    """.split()
)


def is_stopword(token: str) -> bool:
    return token in STOPWORDS
