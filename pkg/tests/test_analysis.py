"""
Tests for the downstream analyses: prices, losses, temporal buckets,
phisher statistics, outcomes, gang graphs and the report bundle.
"""

import csv
import json
from datetime import datetime, timezone
from decimal import Decimal

import pytest

from solphish.analysis import (
    ConsistencyError,
    EdgeKind,
    GangGraph,
    MissingHistory,
    Outcome,
    PriceTable,
    PriceTableError,
    TopologyHint,
    attach_losses,
    build_gang_graph,
    build_report,
    check_consistency,
    classify_detections,
    compute_loss,
    daily_losses,
    evaluate_detections,
    fetch_price_table,
    find_gangs,
    lifecycle_summary,
    load_price_table,
    loss_summary,
    monthly_histogram,
    phisher_stats,
    round_usd,
    summarize_gangs,
    top_phishers,
    top_tokens,
    write_report_bundle,
)
from solphish.ingest import load_fixture
from solphish.rules import Detection, PhishType
from solphish.synth import gen_gang_corpus

from conftest import (
    AAT_FIXTURE,
    JULY_1_2024,
    PRICES_FILE,
    STMT_FIXTURE,
    USDC,
    USDT,
    addr,
    make_tx,
    native,
    set_owner,
    sol_transfer,
    stmt_drain,
    token,
)

DAY = 86400
AS_OF = datetime(2024, 7, 1, tzinfo=timezone.utc)


def _detection(signature, phisher, victim=None, phish_type=PhishType.STMT, block_time=JULY_1_2024,
               loss=None, assets=()):
    return Detection(signature, [phish_type], victim or addr(f"victim-{signature}"), phisher,
                     {phish_type.value: {'hit': True}}, block_time=block_time,
                     assets=list(assets), loss_usd=loss)


@pytest.fixture(scope='module')
def prices():
    return load_price_table(PRICES_FILE)


@pytest.fixture(scope='module')
def fixture_detections(ruleset):
    txs = load_fixture(STMT_FIXTURE) + load_fixture(AAT_FIXTURE)
    return [ruleset.classify(tx) for tx in txs], txs


class TestPrices:
    def test_shipped_snapshot(self, prices):
        assert prices.price_of('NATIVE') == Decimal('146.68')
        assert prices.price_of(USDC) == Decimal('0.9998')
        assert prices.price_of(addr('unknown-mint')) is None
        assert prices.source == 'example snapshot'

    def test_price_with_own_timestamp(self, tmp_path):
        path = tmp_path / 'prices.json'
        path.write_text(json.dumps({'prices': {USDC: {'usd': '1.0', 'as_of': '2024-06-01T00:00:00Z'}}}),
                        encoding='utf-8')
        table = load_price_table(str(path))
        assert table.entries[USDC] == (Decimal('1.0'), datetime(2024, 6, 1, tzinfo=timezone.utc))

    @pytest.mark.parametrize('content', [
        '{"prices": [1, 2]}',
        '{"prices": {"NATIVE": "-1"}}',
        '{"prices": {"not-a-mint": "1"}}',
        '{"prices": {"NATIVE": "abc"}}',
        '{"prices": ',
    ])
    def test_rejects_bad_tables(self, tmp_path, content):
        path = tmp_path / 'prices.json'
        path.write_text(content, encoding='utf-8')
        with pytest.raises(PriceTableError):
            load_price_table(str(path))

    def test_fetch_from_price_api(self):
        class Response:
            def raise_for_status(self):
                pass

            def json(self):
                return {'data': {'So11111111111111111111111111111111111111112': {'price': '150.5'},
                                 USDC: {'price': '1.0001'}}}

        class Session:
            params = None

            def get(self, url, params=None, timeout=None):
                Session.params = params
                return Response()

        table = fetch_price_table(['NATIVE', USDC, USDT], session=Session())
        assert table.price_of('NATIVE') == Decimal('150.5')
        assert table.price_of(USDC) == Decimal('1.0001')
        assert USDT not in table
        assert 'So11111111111111111111111111111111111111112' in Session.params['ids']


class TestLoss:
    def test_stmt_fixture_loss(self, ruleset, prices):
        [tx] = load_fixture(STMT_FIXTURE)
        result = compute_loss(ruleset.classify(tx), tx, prices)
        assert result.loss_usd == Decimal('2002.52708643')
        assert round_usd(result.loss_usd) == Decimal('2002.53')
        assert result.unpriced_assets == []

    def test_aat_fixture_loss(self, ruleset, prices):
        # Everything left in the reassigned wallet and token account, rent included
        [tx] = load_fixture(AAT_FIXTURE)
        result = compute_loss(ruleset.classify(tx), tx, prices)
        assert result.loss_usd == Decimal('314.3123881904')
        assert round_usd(result.loss_usd) == Decimal('314.31')

    def test_aat_token_account_at_one_dollar(self, ruleset):
        wallet, account, collector = addr('w'), addr('acct'), addr('collector')
        tx = make_tx([set_owner(account, collector, wallet)],
                     [token(account, USDC, wallet, 50_000_000, 50_000_000)], [wallet])
        detection = ruleset.classify(tx)
        table = PriceTable({USDC: (Decimal('1.00'), AS_OF)})
        result = compute_loss(detection, tx, table)
        assert round_usd(result.loss_usd) == Decimal('50.00')

    def test_fee_not_counted(self, ruleset):
        victim, phisher = addr('v'), addr('p')
        tx = stmt_drain(victim, phisher)
        table = PriceTable({'NATIVE': (Decimal('100'), AS_OF)})
        result = compute_loss(ruleset.classify(tx), tx, table)
        assert result.loss_usd == Decimal('100')
        assert result.unpriced_assets == [USDC, USDT]

    def test_wrong_transaction(self, ruleset, prices):
        [stmt] = load_fixture(STMT_FIXTURE)
        [aat] = load_fixture(AAT_FIXTURE)
        with pytest.raises(ValueError):
            compute_loss(ruleset.classify(stmt), aat, prices)

    def test_attach_losses(self, fixture_detections, prices):
        detections, txs = fixture_detections
        priced, unpriced = attach_losses(detections, {tx.signature: tx for tx in txs}, prices)
        assert [round_usd(d.loss_usd) for d in priced] == [Decimal('2002.53'), Decimal('314.31')]
        assert not unpriced

    def test_attach_without_transaction(self, fixture_detections, prices):
        detections, _ = fixture_detections
        priced, _ = attach_losses(detections, {}, prices)
        assert [d.loss_usd for d in priced] == [None, None]

    def test_summary(self):
        detections = [
            _detection('a', addr('p1'), loss=Decimal('10')),
            _detection('b', addr('p1'), loss=Decimal('30')),
            _detection('c', addr('p2'), phish_type=PhishType.AAT, loss=Decimal('5.5')),
            _detection('d', addr('p3'), phish_type=PhishType.ISA),
        ]
        summary = loss_summary(detections)
        assert summary.total == Decimal('45.5')
        assert summary.count == 4
        stmt = summary.per_type[PhishType.STMT]
        assert (stmt.count, stmt.total, stmt.average, stmt.highest) == (
            2, Decimal('40'), Decimal('20'), Decimal('30'))
        assert summary.per_type[PhishType.ISA].total == 0
        assert summary.to_dict()['total_usd'] == '45.50'

    def test_summary_check_catches_drift(self):
        summary = loss_summary([_detection('a', addr('p'), loss=Decimal('10'))])
        summary.total = Decimal('11')
        with pytest.raises(ConsistencyError) as info:
            summary.check()
        assert info.value.invariant == 'loss additivity'

    def test_top_tokens(self):
        detections = [
            _detection('a', addr('p'), assets=['NATIVE', USDC, USDT]),
            _detection('b', addr('p'), assets=[USDT]),
            _detection('c', addr('p'), assets=[USDC, 'NATIVE']),
        ]
        assert top_tokens(detections, 5) == [(USDC, 2), (USDT, 2)]
        assert ('NATIVE', 2) in top_tokens(detections, 3, include_native=True)
        with pytest.raises(ValueError):
            top_tokens(detections, 0)


class TestTemporal:
    def test_monthly_histogram(self):
        may, june = 1714521600, 1717200000  # 2024-05-01, 2024-06-01 UTC
        detections = [
            _detection('a', addr('p'), block_time=may),
            _detection('b', addr('p'), block_time=may + DAY, phish_type=PhishType.AAT),
            _detection('c', addr('p'), block_time=june - 1),
            _detection('d', addr('p'), block_time=june),
        ]
        histogram = monthly_histogram(detections)
        assert histogram == {(2024, 5): {'AAT': 1, 'STMT': 2}, (2024, 6): {'STMT': 1}}
        assert list(histogram) == [(2024, 5), (2024, 6)]

    def test_daily_losses_skip_unpriced(self):
        detections = [
            _detection('a', addr('p'), loss=Decimal('1.5')),
            _detection('b', addr('p'), loss=Decimal('2'), block_time=JULY_1_2024 + 60),
            _detection('c', addr('p')),
        ]
        assert daily_losses(detections) == {('2024-07-01', 'STMT'): Decimal('3.5')}


class TestPhishers:
    def _history(self, phisher, block_time):
        other = addr('counterparty')
        return make_tx([sol_transfer(phisher, other, 1)],
                       [native(phisher, 10, 9), native(other, 0, 1)], [phisher],
                       block_time=block_time)

    def test_stats_and_periods(self):
        phisher = addr('phisher')
        start = JULY_1_2024
        detections = [
            _detection('a', phisher, block_time=start, loss=Decimal('5')),
            _detection('b', phisher, block_time=start + 10 * DAY, loss=Decimal('7')),
            _detection('c', phisher, phish_type=PhishType.AAT, block_time=start + 2 * DAY),
        ]
        histories = {phisher: [self._history(phisher, start + 40 * DAY)]}
        [stats] = phisher_stats(detections, histories)
        assert stats.attempts == 3
        assert stats.total_loss_usd == Decimal('12')
        assert stats.dominant_type is PhishType.STMT
        assert stats.type_counts == {'AAT': 1, 'STMT': 2}
        assert stats.phishing_period == 10 * DAY
        assert stats.dormant_period == 30 * DAY
        assert not stats.history_missing

        summary = lifecycle_summary([stats], as_of=start + 100 * DAY)
        assert summary['inactive'] == 1
        assert summary['per_type']['STMT'] == {
            'accounts': 1,
            'median_phishing_days': 10.0,
            'median_dormant_days': 30.0,
            'mean_phishing_share': 0.25,
        }

    def test_dominant_type_tie_uses_precedence(self):
        phisher = addr('phisher')
        detections = [_detection('a', phisher, phish_type=PhishType.ISA),
                      _detection('b', phisher, phish_type=PhishType.AAT)]
        [stats] = phisher_stats(detections, {phisher: []})
        assert stats.dominant_type is PhishType.AAT

    def test_missing_history_flagged(self):
        [stats] = phisher_stats([_detection('a', addr('phisher'))], {})
        assert stats.history_missing
        assert stats.dormant_period == 0

    def test_missing_history_strict(self):
        with pytest.raises(MissingHistory):
            phisher_stats([_detection('a', addr('phisher'))], {}, strict=True)

    def test_ranking(self):
        busy, rich = addr('busy'), addr('rich')
        detections = [_detection('a', busy, loss=Decimal('1')),
                      _detection('b', busy, loss=Decimal('1')),
                      _detection('c', rich, loss=Decimal('100'))]
        stats = phisher_stats(detections, {})
        assert [s.account for s in stats] == [busy, rich]
        assert top_phishers(stats, 1, by='loss')[0].account == rich
        with pytest.raises(ValueError):
            top_phishers(stats, 1, by='age')


class TestOutcomes:
    def test_three_outcomes(self):
        p1, p2, outsider = addr('p1'), addr('p2'), addr('outsider')
        detections = [
            _detection('a', p1, victim=addr('user')),
            _detection('b', p2, victim=p1),
            _detection('c', outsider, victim=p2),
        ]
        report = classify_detections(detections, {p1, p2})
        assert report.outcomes == [Outcome.PHISHING, Outcome.MUTUAL_TRANSFER, Outcome.LAUNDERING]
        assert report.gang_candidates == [outsider]
        assert report.counts() == {'Phishing': 1, 'MutualTransfer': 1, 'Laundering': 1}

    def test_empty_label_set(self):
        with pytest.raises(ValueError):
            classify_detections([], set())

    def test_evaluation(self):
        detections = [
            _detection('a', addr('p')),
            _detection('b', addr('p'), phish_type=PhishType.AAT),
            _detection('c', addr('p')),
        ]
        expected = {'a': {PhishType.STMT}, 'b': {PhishType.STMT}, 'd': {PhishType.ISA}, 'e': set()}
        report = evaluate_detections(detections, expected)
        assert report.per_type[PhishType.STMT].true_positives == 1
        assert report.per_type[PhishType.STMT].detected == 2
        assert report.per_type[PhishType.STMT].expected == 2
        assert report.precision == pytest.approx(1 / 3)
        assert report.recall == pytest.approx(1 / 3)
        assert report.exact_matches == 2
        assert report.false_positive_signatures == ['b', 'c']
        assert report.missed_signatures == ['b', 'd']


class TestGangs:
    def test_interactions_merge(self):
        a, b = addr('a'), addr('b')
        graph = GangGraph([a, b])
        graph.add_interaction(a, b, EdgeKind.TRANSFER)
        graph.add_interaction(a, b, EdgeKind.TRANSFER)
        graph.add_interaction(a, b, EdgeKind.AUTHORITY_TRANSFER)
        graph.add_interaction(a, a, EdgeKind.TRANSFER)
        assert graph.edge_count(a, b, EdgeKind.TRANSFER) == 2
        assert len(graph.edges()) == 2
        assert graph.out_degree(a) == 1 and graph.in_degree(a) == 0

    def test_gang_corpus(self):
        corpus = gen_gang_corpus()
        graph = build_gang_graph(corpus.labeled, corpus.transactions)
        assert graph.nodes == set(corpus.labeled)
        gangs = find_gangs(graph)
        assert [(g.members, g.topology, g.hub) for g in gangs] == [
            (e.members, e.topology, e.hub) for e in corpus.gangs]
        in_gangs = {m for g in gangs for m in g.members}
        assert not in_gangs & set(corpus.isolated)

    def test_repeated_link_counted(self):
        corpus = gen_gang_corpus()
        graph = build_gang_graph(corpus.labeled, corpus.transactions)
        star = corpus.gangs[0]
        first = sorted(m for m in star.members if m != star.hub)
        counts = [graph.edge_count(star.hub, m, EdgeKind.TRANSFER) for m in first]
        assert sorted(counts) == [1] * (len(first) - 1) + [2]

    def test_tree_has_authority_edge(self):
        corpus = gen_gang_corpus()
        graph = build_gang_graph(corpus.labeled, corpus.transactions)
        kinds = {e.kind for e in graph.edges() if e.source in corpus.gangs[1].members}
        assert kinds == {EdgeKind.TRANSFER, EdgeKind.AUTHORITY_TRANSFER}

    def test_duplicate_transactions_count_once(self):
        corpus = gen_gang_corpus()
        once = build_gang_graph(corpus.labeled, corpus.transactions)
        twice = build_gang_graph(corpus.labeled, corpus.transactions * 2)
        assert once.edges() == twice.edges()

    def _topology(self, links):
        graph = GangGraph(sorted({a for link in links for a in link[:2]}))
        for source, target, kind in links:
            graph.add_interaction(source, target, kind)
        [gang] = find_gangs(graph)
        return gang.topology, gang.hub

    def test_chain_is_tree(self):
        a, b, c, d = addr('a'), addr('b'), addr('c'), addr('d')
        links = [(a, b, EdgeKind.TRANSFER), (b, c, EdgeKind.TRANSFER),
                 (c, d, EdgeKind.AUTHORITY_TRANSFER)]
        assert self._topology(links) == (TopologyHint.TREE, None)

    def test_star_in_and_out(self):
        hub, others = addr('hub'), [addr(f"m{i}") for i in range(4)]
        assert self._topology([(hub, m, EdgeKind.TRANSFER) for m in others]) == \
            (TopologyHint.STAR_OUT, hub)
        assert self._topology([(m, hub, EdgeKind.TRANSFER) for m in others]) == \
            (TopologyHint.STAR_IN, hub)

    @pytest.mark.parametrize('links', [
        [('a', 'b', EdgeKind.TRANSFER), ('b', 'a', EdgeKind.TRANSFER)],
        [('a', 'b', EdgeKind.TRANSFER), ('b', 'a', EdgeKind.TRANSFER),
         ('b', 'c', EdgeKind.TRANSFER)],
        [('a', 'b', EdgeKind.TRANSFER), ('b', 'c', EdgeKind.TRANSFER),
         ('c', 'a', EdgeKind.TRANSFER)],
        [('a', 'b', EdgeKind.TRANSFER), ('b', 'c', EdgeKind.TRANSFER),
         ('c', 'a', EdgeKind.TRANSFER), ('c', 'd', EdgeKind.AUTHORITY_TRANSFER)],
        [('a', 'b', EdgeKind.TRANSFER), ('a', 'b', EdgeKind.AUTHORITY_TRANSFER),
         ('b', 'c', EdgeKind.TRANSFER), ('c', 'd', EdgeKind.TRANSFER)],
    ], ids=['two-cycle', 'two-cycle-and-leaf', 'triangle', 'triangle-and-leaf',
            'two-kinds-one-pair'])
    def test_cycles_are_other(self, links):
        links = [(addr(s), addr(t), kind) for s, t, kind in links]
        assert self._topology(links) == (TopologyHint.OTHER, None)

    def test_summaries(self):
        a, b = addr('a'), addr('b')
        graph = GangGraph([a, b, addr('lonely')])
        graph.add_interaction(a, b, EdgeKind.TRANSFER)
        [gang] = find_gangs(graph)
        assert gang.topology is TopologyHint.STAR_OUT
        detections = [_detection('x', a, loss=Decimal('3')), _detection('y', addr('z'))]
        [summary] = summarize_gangs([gang], detections)
        assert summary.detections == 1
        assert summary.to_dict()['loss_usd'] == '3.00'


class TestReport:
    def test_bundle(self, tmp_path, fixture_detections, prices):
        detections, txs = fixture_detections
        report = build_report(detections, txs, prices)
        check_consistency(report)
        written = write_report_bundle(report, str(tmp_path))
        names = [p.rsplit('/', 1)[-1] for p in written]
        assert names == ['monthly_histogram.csv', 'daily_losses.csv', 'phisher_stats.csv',
                         'gangs.json', 'summary.json', 'report.txt']

        summary = json.loads((tmp_path / 'summary.json').read_text(encoding='utf-8'))
        assert summary['detections'] == 2
        assert summary['losses']['total_usd'] == '2316.84'
        per_type = {row['type']: row['total_usd'] for row in summary['losses']['per_type']}
        assert per_type == {'AAT': '314.31', 'STMT': '2002.53', 'ISA': '0.00'}

        with open(tmp_path / 'phisher_stats.csv', encoding='utf-8') as f:
            rows = list(csv.DictReader(f))
        assert sorted(r['attempts'] for r in rows) == ['1', '1']
        assert 'Losses (USD)' in (tmp_path / 'report.txt').read_text(encoding='utf-8')

    def test_inconsistent_report_not_written(self, tmp_path, fixture_detections):
        detections, txs = fixture_detections
        report = build_report(detections, txs)
        report.histogram = {}
        with pytest.raises(ConsistencyError) as info:
            write_report_bundle(report, str(tmp_path / 'out'))
        assert info.value.invariant == 'histogram conservation'
        assert not (tmp_path / 'out').exists()

    def test_plots(self, tmp_path, fixture_detections, prices):
        detections, txs = fixture_detections
        written = write_report_bundle(build_report(detections, txs, prices), str(tmp_path),
                                      plots=True)
        pngs = [p for p in written if p.endswith('.png')]
        assert len(pngs) == 3
        for path in pngs:
            with open(path, 'rb') as f:
                assert f.read(8) == b'\x89PNG\r\n\x1a\n'
