"""
Gang Corpus

Labeled phishing accounts wired into three gangs (a star fanning out
from a hub, a tree, and a star collecting into one account) plus
isolated labeled accounts. Every account also trades with unlabeled
wallets, which must not link anything.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..analysis.gangs import TopologyHint
from ..txmodel import Address, Transaction
from .addresses import random_address
from .generators import WINDOW_START, Sample, gen_aat_phish, gen_benign_transfer

DEFAULT_GANG_SEED = 11
STAR_OUT_SIZE = 8
TREE_SIZE = 7
STAR_IN_SIZE = 4
ISOLATED = 3


@dataclass
class ExpectedGang:
    members: List[Address]
    topology: TopologyHint
    hub: Optional[Address] = None


@dataclass
class GangCorpus:
    samples: List[Sample]
    labeled: List[Address]
    gangs: List[ExpectedGang]
    isolated: List[Address]

    @property
    def transactions(self) -> List[Transaction]:
        return [s.transaction for s in self.samples]


def gen_gang_corpus(seed: int = DEFAULT_GANG_SEED, isolated: int = ISOLATED) -> GangCorpus:
    """
    Generate the gang corpus.

    Gang links are direct transfers (native or token, so token accounts
    must be folded into owners) and one token-authority hand-over inside
    the tree. The hub-to-first-member pair is linked twice.

    Returns:
        GangCorpus whose gangs are listed largest first, members sorted
    """
    rng = np.random.default_rng(seed)
    star_out = [random_address(rng) for _ in range(STAR_OUT_SIZE)]
    tree = [random_address(rng) for _ in range(TREE_SIZE)]
    star_in = [random_address(rng) for _ in range(STAR_IN_SIZE)]
    loners = [random_address(rng) for _ in range(isolated)]

    hub, collector = star_out[0], star_in[0]
    root, left, right, *leaves = tree
    links: List[Tuple[Address, Address, str]] = [(hub, m, 'transfer') for m in star_out[1:]]
    links.append((hub, star_out[1], 'transfer'))
    links += [
        (root, left, 'transfer'), (root, right, 'transfer'),
        (left, leaves[0], 'transfer'), (left, leaves[1], 'authority'),
        (right, leaves[2], 'transfer'), (right, leaves[3], 'transfer'),
    ]
    links += [(feeder, collector, 'transfer') for feeder in star_in[1:]]

    labeled = star_out + tree + star_in + loners
    for account in labeled:
        links.append((account, random_address(rng), 'transfer'))
        links.append((random_address(rng), account, 'transfer'))

    samples = []
    block_time = WINDOW_START
    for i in rng.permutation(len(links)):
        source, target, how = links[int(i)]
        block_time += int(rng.integers(600, 7200))
        if how == 'authority':
            samples.append(gen_aat_phish(rng, 'token', block_time=block_time, victim=source,
                                         phisher=target))
        else:
            samples.append(gen_benign_transfer(rng, block_time=block_time, n_transfers=1,
                                               sender=source, recipient=target))

    gangs = [
        ExpectedGang(sorted(star_out), TopologyHint.STAR_OUT, hub),
        ExpectedGang(sorted(tree), TopologyHint.TREE),
        ExpectedGang(sorted(star_in), TopologyHint.STAR_IN, collector),
    ]
    return GangCorpus(samples=samples, labeled=sorted(labeled), gangs=gangs,
                      isolated=sorted(loners))
