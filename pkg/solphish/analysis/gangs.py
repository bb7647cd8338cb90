"""
Gang Graphs

Directed multigraph of labeled phishing accounts linked by direct fund
transfers and authority transfers. Gangs are its weakly connected
components; each carries a descriptive topology hint.
"""

import logging
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set

import networkx as nx

from ..rules import Detection
from ..txmodel import Address, InstructionKind, Transaction, authorizer_of
from .loss import round_usd

logger = logging.getLogger(__name__)

STAR_SHARE = 0.8


class EdgeKind(Enum):
    TRANSFER = 'Transfer'
    AUTHORITY_TRANSFER = 'AuthorityTransfer'


class TopologyHint(Enum):
    STAR_IN = 'StarIn'
    STAR_OUT = 'StarOut'
    TREE = 'Tree'
    OTHER = 'Other'


@dataclass(frozen=True)
class GangEdge:
    source: Address
    target: Address
    kind: EdgeKind
    count: int

    def to_dict(self) -> Dict:
        return {'from': str(self.source), 'to': str(self.target),
                'kind': self.kind.value, 'count': self.count}


class GangGraph:
    """
    Labeled accounts and their interactions.

    Parallel interactions of one kind between the same ordered pair are
    a single edge whose count accumulates. Self-loops are never stored.
    """

    def __init__(self, nodes: Iterable[str] = ()):
        self.graph = nx.MultiDiGraph()
        self.graph.add_nodes_from(Address(n) for n in nodes)

    @property
    def nodes(self) -> Set[Address]:
        return set(self.graph.nodes)

    def add_interaction(self, source: str, target: str, kind: EdgeKind, count: int = 1):
        if source == target:
            return
        source, target = Address(source), Address(target)
        if self.graph.has_edge(source, target, key=kind):
            self.graph[source][target][kind]['count'] += count
        else:
            self.graph.add_edge(source, target, key=kind, count=count)

    def edges(self) -> List[GangEdge]:
        """All edges, sorted by (from, to, kind)"""
        edges = [GangEdge(u, v, k, data['count'])
                 for u, v, k, data in self.graph.edges(keys=True, data=True)]
        return sorted(edges, key=lambda e: (e.source, e.target, e.kind.value))

    def edge_count(self, source: str, target: str, kind: EdgeKind) -> int:
        data = self.graph.get_edge_data(source, target, key=kind)
        return data['count'] if data else 0

    def in_degree(self, node: str) -> int:
        """Distinct accounts with an edge into node"""
        return len(set(self.graph.predecessors(node)))

    def out_degree(self, node: str) -> int:
        return len(set(self.graph.successors(node)))


@dataclass
class Gang:
    members: List[Address]
    edges: List[GangEdge]
    topology: TopologyHint
    hub: Optional[Address] = None

    def to_dict(self) -> Dict:
        return {
            'size': len(self.members),
            'topology': self.topology.value,
            'hub': str(self.hub) if self.hub is not None else None,
            'members': [str(m) for m in self.members],
            'edges': [e.to_dict() for e in self.edges],
        }


def _wallet(tx: Transaction, account: Optional[Address]) -> Optional[Address]:
    if account is None:
        return None
    return tx.owner_of(account) or account


def build_gang_graph(labeled: Iterable[str], txs: Iterable[Transaction],
                     candidates: Iterable[str] = ()) -> GangGraph:
    """
    Build the interaction graph among labeled accounts and gang candidates.

    Token accounts are folded into their owners. Each transaction counts
    once even if it appears in several histories.

    Args:
        labeled: Labeled phishing accounts
        txs: Transactions from the labeled accounts' histories
        candidates: Extra accounts to keep, e.g. laundering destinations

    Returns:
        GangGraph whose nodes are every labeled account and candidate
    """
    members = {Address(a) for a in labeled} | {Address(a) for a in candidates}
    graph = GangGraph(members)
    seen = set()
    for tx in txs:
        if tx.signature in seen or not tx.success:
            continue
        seen.add(tx.signature)
        for ins in tx.instructions:
            if ins.kind is InstructionKind.TRANSFER:
                kind = EdgeKind.TRANSFER
                source = _wallet(tx, ins.source)
                target = _wallet(tx, ins.destination)
            elif ins.is_authority_change:
                kind = EdgeKind.AUTHORITY_TRANSFER
                source = authorizer_of(tx, ins)
                target = ins.new_authority
            else:
                continue
            if source in members and target in members:
                graph.add_interaction(source, target, kind)
    logger.info("Gang graph: %d node(s), %d edge(s) from %d transaction(s)",
                graph.graph.number_of_nodes(), graph.graph.number_of_edges(), len(seen))
    return graph


def topology_hint(component: nx.MultiDiGraph):
    """
    Describe a component's shape.

    The star shares count distinct directed pairs; the tree test counts
    every (from, to, kind) edge.

    Returns:
        (TopologyHint, hub or None)
    """
    pairs = {(u, v) for u, v in component.edges()}
    if not pairs:
        return TopologyHint.OTHER, None
    sources: Dict[Address, int] = {}
    targets: Dict[Address, int] = {}
    for u, v in pairs:
        sources[u] = sources.get(u, 0) + 1
        targets[v] = targets.get(v, 0) + 1

    hub, out_pairs = min(sources.items(), key=lambda item: (-item[1], item[0]))
    if out_pairs >= STAR_SHARE * len(pairs):
        return TopologyHint.STAR_OUT, hub
    hub, in_pairs = min(targets.items(), key=lambda item: (-item[1], item[0]))
    if in_pairs >= STAR_SHARE * len(pairs):
        return TopologyHint.STAR_IN, hub

    # one undirected edge per (from, to, kind), so A->B plus B->A is a cycle
    undirected = nx.MultiGraph()
    undirected.add_nodes_from(component.nodes)
    undirected.add_edges_from((u, v) for u, v, _ in component.edges(keys=True))
    if undirected.number_of_edges() == undirected.number_of_nodes() - 1 and nx.is_tree(undirected):
        return TopologyHint.TREE, None
    return TopologyHint.OTHER, None


def find_gangs(graph: GangGraph) -> List[Gang]:
    """
    Weakly connected components with at least two accounts.

    Returns:
        Gangs sorted by size descending, then smallest member ascending
    """
    gangs = []
    for members in nx.weakly_connected_components(graph.graph):
        if len(members) < 2:
            continue
        component = graph.graph.subgraph(members)
        topology, hub = topology_hint(component)
        member_set = set(members)
        edges = [e for e in graph.edges() if e.source in member_set]
        gangs.append(Gang(members=sorted(members), edges=edges, topology=topology, hub=hub))
    gangs.sort(key=lambda g: (-len(g.members), g.members[0]))
    return gangs


@dataclass
class GangSummary:
    index: int
    gang: Gang
    detections: int = 0
    loss_usd: Decimal = Decimal(0)
    types: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        data = {'gang': self.index}
        data.update(self.gang.to_dict())
        data['detections'] = self.detections
        data['loss_usd'] = str(round_usd(self.loss_usd))
        data['types'] = dict(sorted(self.types.items()))
        return data


def summarize_gangs(gangs: List[Gang], detections: Iterable[Detection]) -> List[GangSummary]:
    """Detections and losses attributed to each gang through its members as phishers."""
    summaries = [GangSummary(index=i + 1, gang=g) for i, g in enumerate(gangs)]
    owner = {}
    for summary in summaries:
        for member in summary.gang.members:
            owner[member] = summary
    for detection in detections:
        summary = owner.get(detection.phisher)
        if summary is None:
            continue
        summary.detections += 1
        summary.loss_usd += detection.loss_usd or Decimal(0)
        key = detection.primary_type.value
        summary.types[key] = summary.types.get(key, 0) + 1
    return summaries
