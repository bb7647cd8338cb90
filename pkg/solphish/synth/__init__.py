"""
Synthetic Oracle

Seeded generators of labeled Solana transactions (benign, market,
self-dealing and the three phishing families), the mixed labeled corpus
with its manifest, and the gang corpus used to test graph extraction.
"""

from .addresses import random_address, random_blockhash, random_signature, vanity_address
from .builder import PayloadBuilder
from .corpus import (
    DEFAULT_COUNTS,
    DEFAULT_SEED,
    LabeledCorpus,
    build_manifest,
    generate_corpus,
    read_corpus,
    read_labels,
    resolve_counts,
    write_corpus,
)
from .errors import CorpusWriteError
from .gangs import ExpectedGang, GangCorpus, gen_gang_corpus
from .generators import (
    JITO_TIP_ROUTER,
    MARKET_PROGRAMS,
    MINTS,
    Sample,
    gen_aat_phish,
    gen_benign_control,
    gen_benign_transfer,
    gen_isa_phish,
    gen_jito_router_assign,
    gen_market_swap,
    gen_program_activity,
    gen_self_dealing,
    gen_stmt_phish,
)
from .labels import Label

__all__ = [
    'random_address', 'random_blockhash', 'random_signature', 'vanity_address',
    'PayloadBuilder',
    'DEFAULT_COUNTS', 'DEFAULT_SEED', 'LabeledCorpus', 'build_manifest', 'generate_corpus',
    'read_corpus', 'read_labels', 'resolve_counts', 'write_corpus',
    'CorpusWriteError',
    'ExpectedGang', 'GangCorpus', 'gen_gang_corpus',
    'JITO_TIP_ROUTER', 'MARKET_PROGRAMS', 'MINTS', 'Sample',
    'gen_aat_phish', 'gen_benign_control', 'gen_benign_transfer', 'gen_isa_phish',
    'gen_jito_router_assign', 'gen_market_swap', 'gen_program_activity', 'gen_self_dealing',
    'gen_stmt_phish',
    'Label',
]
