"""
Tests for data collection: normalization of recorded payloads, fixture
files, the signature cache and the JSON-RPC client against a fake endpoint.
"""

import copy
import json
import os
import tempfile
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solphish.ingest import (
    EndpointUnavailable,
    IngestConfig,
    InvalidSignature,
    MalformedPayload,
    NotFound,
    RateLimited,
    RawTransactionRecord,
    RpcClient,
    RpcError,
    TransactionCache,
    load_fixture,
    load_records,
    normalize,
    normalize_authority_type,
    write_fixture,
)
from solphish.synth import gen_benign_transfer, generate_corpus, write_corpus
from solphish.txmodel import SYSTEM_PROGRAM, Asset, InstructionKind

from conftest import (
    AAT_FIXTURE,
    FUND_TRANSFER_FIXTURE,
    STMT_FIXTURE,
    USDC,
    FakeEndpoint,
    FakeResponse,
    rpc_error,
)

ENDPOINT = 'http://rpc.test'
VICTIM = '5u2oL7jvS8Ec1pRHDSKJjRPQCuz1tJYQnSBhiPzcJS2o'
STMT_PHISHER = 'Gck5PWhKL4Qn87bhFwpL19Y5gkAbFN93GXXsTzuJ1VX4'
BNRT = 'BNRThTYg9x49JYNkbDUYERb3X7JV2GYcEpFLAUHX5Rep'


def _record(path):
    return load_records(path)[0]


def _with_payload(record, payload):
    return RawTransactionRecord(signature=record.signature, payload=payload,
                                fetched_at=record.fetched_at)


class TestNormalize:
    def test_stmt_fixture(self):
        [tx] = load_fixture(STMT_FIXTURE)
        assert tx.fee_payer == VICTIM
        assert tx.success
        assert tx.fee == 5000
        assert len(tx.transfers()) == 5
        assert [ins.depth for ins in tx.instructions] == [0, 0, 0, 0, 0]
        assert len([e for e in tx.token_balances() if e.drained]) == 4
        assert tx.native_sum_matches_fee()
        usdc = tx.transfers()[0]
        assert usdc.mint == USDC
        assert usdc.amount == 1_250_500_000
        native = tx.transfers()[-1]
        assert native.program == SYSTEM_PROGRAM
        assert native.destination == STMT_PHISHER

    def test_inner_instructions_follow_their_parent(self):
        [tx] = load_fixture(AAT_FIXTURE)
        kinds = [(ins.kind, ins.depth) for ins in tx.instructions]
        assert kinds == [
            (InstructionKind.ASSIGN, 0),
            (InstructionKind.OTHER, 0),
            (InstructionKind.SET_AUTHORITY, 1),
        ]
        assign, invoke, set_authority = tx.instructions
        assert assign.new_authority == BNRT
        assert invoke.program == BNRT
        assert set_authority.authority_type == 'accountowner'

    def test_pre_transaction_owner_kept(self):
        [tx] = load_fixture(AAT_FIXTURE)
        [entry] = tx.token_balances()
        # Post balances already name the new owner
        assert entry.owner == '5bVrTFz4y31m9CB6Ka9mnVzsNqxYZeQ7bnJzA839oet7'
        assert entry.pre == entry.post == 50_000_000

    def test_plain_token_transfer_gets_mint_from_balances(self):
        [tx] = load_fixture(FUND_TRANSFER_FIXTURE)
        assert {ins.asset for ins in tx.transfers()} == {Asset.token(USDC)}

    @pytest.mark.parametrize('raw, expected', [
        ('accountOwner', 'accountowner'),
        ('account owner', 'accountowner'),
        ('AccountOwner', 'accountowner'),
        ('closeAccount', 'closeaccount'),
    ])
    def test_authority_type_spellings(self, raw, expected):
        assert normalize_authority_type(raw) == expected

    def test_failed_transaction(self):
        record = _record(STMT_FIXTURE)
        payload = copy.deepcopy(record.payload)
        payload['meta']['err'] = {'InstructionError': [0, 'Custom']}
        assert not normalize(_with_payload(record, payload)).success

    def test_missing_section_names_path(self):
        record = _record(STMT_FIXTURE)
        payload = copy.deepcopy(record.payload)
        del payload['meta']['preBalances']
        with pytest.raises(MalformedPayload) as info:
            normalize(_with_payload(record, payload))
        assert info.value.path == '$.meta.preBalances'

    def test_bad_address_names_path(self):
        record = _record(STMT_FIXTURE)
        payload = copy.deepcopy(record.payload)
        payload['transaction']['message']['instructions'][4]['parsed']['info']['destination'] = 'nope'
        with pytest.raises(MalformedPayload) as info:
            normalize(_with_payload(record, payload))
        assert info.value.path == '$.transaction.message.instructions[4].parsed.info.destination'

    def test_empty_instruction_type_names_path(self):
        record = _record(STMT_FIXTURE)
        payload = copy.deepcopy(record.payload)
        payload['transaction']['message']['instructions'][0]['parsed']['type'] = ''
        with pytest.raises(MalformedPayload) as info:
            normalize(_with_payload(record, payload))
        assert info.value.path == '$.transaction.message.instructions[0]'

    def test_balance_count_mismatch(self):
        record = _record(STMT_FIXTURE)
        payload = copy.deepcopy(record.payload)
        payload['meta']['postBalances'].pop()
        with pytest.raises(MalformedPayload):
            normalize(_with_payload(record, payload))

    def test_signature_must_match_record(self):
        record = _record(STMT_FIXTURE)
        other = RawTransactionRecord(signature=_record(AAT_FIXTURE).signature,
                                     payload=record.payload, fetched_at=record.fetched_at)
        with pytest.raises(MalformedPayload):
            normalize(other)

    def test_record_needs_sections(self):
        with pytest.raises(MalformedPayload):
            RawTransactionRecord(signature='x', payload={'meta': {}},
                                 fetched_at=datetime.now(timezone.utc))


class TestFixtureFiles:
    def test_write_then_load(self, tmp_path):
        records = [_record(STMT_FIXTURE), _record(AAT_FIXTURE)]
        path = tmp_path / 'nested' / 'history.jsonl'
        assert write_fixture(str(path), records) == 2
        loaded = load_records(str(path))
        assert [r.signature for r in loaded] == [r.signature for r in records]
        assert loaded[0].payload == records[0].payload
        assert path.read_bytes().count(b'\n') == 2

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / 'f.jsonl'
        path.write_text('\n' + open(STMT_FIXTURE, encoding='utf-8').read() + '\n\n',
                        encoding='utf-8')
        assert len(load_fixture(str(path))) == 1

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / 'f.jsonl'
        path.write_text(open(STMT_FIXTURE, encoding='utf-8').read() + '{not json\n',
                        encoding='utf-8')
        with pytest.raises(MalformedPayload) as info:
            load_records(str(path))
        assert info.value.line == 2

    def test_bad_record_reports_line(self, tmp_path):
        path = tmp_path / 'f.jsonl'
        path.write_text(json.dumps({'signature': 'x', 'payload': {}}) + '\n', encoding='utf-8')
        with pytest.raises(MalformedPayload) as info:
            load_fixture(str(path))
        assert info.value.line == 1
        assert 'line 1' in str(info.value)


    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_corpus_file_loads_back_unchanged(self, seed):
        corpus = generate_corpus(seed=seed, counts={'Benign': 3, 'Market': 1, 'SelfDealing': 1,
                                                    'STMT': 2, 'AAT_Both': 1, 'ISA': 2})
        with tempfile.TemporaryDirectory() as directory:
            write_corpus(corpus, directory)
            loaded = load_fixture(os.path.join(directory, 'transactions.jsonl'))
        assert loaded == corpus.transactions
        assert [tx.instructions for tx in loaded] == [tx.instructions for tx in corpus.transactions]


class TestCache:
    def test_save_and_load(self, tmp_path):
        cache = TransactionCache(str(tmp_path))
        record = _record(AAT_FIXTURE)
        assert cache.load(record.signature) is None
        cache.save(record)
        assert cache.contains(record.signature)
        loaded = cache.load(record.signature)
        assert loaded.payload == record.payload
        assert loaded.fetched_at == record.fetched_at
        assert cache.list_signatures() == [record.signature]

    def test_no_temporary_files_left(self, tmp_path):
        cache = TransactionCache(str(tmp_path))
        cache.save(_record(STMT_FIXTURE))
        cache.save(_record(STMT_FIXTURE))
        assert [p.name for p in tmp_path.iterdir()] == [_record(STMT_FIXTURE).signature + '.json']

    def test_unreadable_entry_is_a_miss(self, tmp_path):
        cache = TransactionCache(str(tmp_path))
        signature = _record(STMT_FIXTURE).signature
        (tmp_path / f"{signature}.json").write_text('{broken', encoding='utf-8')
        assert cache.load(signature) is None

    @pytest.mark.parametrize('signature', ['../escape', 'bad0sig', ''])
    def test_rejects_non_base58_signatures(self, tmp_path, signature):
        cache = TransactionCache(str(tmp_path))
        with pytest.raises(InvalidSignature):
            cache.path_for(signature)
        with pytest.raises(InvalidSignature):
            cache.load(signature)


def _samples(n):
    return [gen_benign_transfer(seed) for seed in range(n)]


def _client(tmp_path, endpoint, **settings):
    config = IngestConfig(endpoint_url=ENDPOINT, cache_dir=str(tmp_path / 'cache'), **settings)
    sleeps = []
    client = RpcClient(config, session=endpoint, sleep=sleeps.append)
    return client, sleeps


class TestRpcClient:
    def test_in_flight_bounded(self, tmp_path):
        samples = _samples(24)
        endpoint = FakeEndpoint({s.signature: s.record.payload for s in samples}, delay=0.01)
        client, _ = _client(tmp_path, endpoint, max_in_flight=3)
        records = client.fetch_transactions([s.signature for s in samples])
        assert [r.signature for r in records] == [s.signature for s in samples]
        assert endpoint.max_in_flight <= 3
        assert endpoint.calls['getTransaction'] == 24

    def test_second_ingest_served_from_cache(self, tmp_path):
        samples = _samples(10)
        endpoint = FakeEndpoint({s.signature: s.record.payload for s in samples})
        client, _ = _client(tmp_path, endpoint)
        signatures = [s.signature for s in samples]
        first = client.fetch_transactions(signatures)
        calls = endpoint.total_calls

        again, _ = _client(tmp_path, endpoint)
        second = again.fetch_transactions(signatures)
        assert endpoint.total_calls == calls
        assert again.network_calls == 0
        assert again.cache_hits == 10
        assert [r.payload for r in second] == [r.payload for r in first]

    def test_ingest_account_pages_signatures(self, tmp_path):
        samples = _samples(7)
        account = str(samples[0].transaction.fee_payer)
        endpoint = FakeEndpoint({s.signature: s.record.payload for s in samples},
                                {account: [s.signature for s in samples]})
        client, _ = _client(tmp_path, endpoint, signature_page_size=3)
        records = client.ingest_account(account, limit=100)
        assert len(records) == 7
        assert endpoint.calls['getSignaturesForAddress'] == 3

    def test_signature_limit(self, tmp_path):
        samples = _samples(5)
        account = str(samples[0].transaction.fee_payer)
        endpoint = FakeEndpoint(signatures={account: [s.signature for s in samples]})
        client, _ = _client(tmp_path, endpoint, signature_page_size=2)
        assert client.fetch_signatures(account, limit=3) == [s.signature for s in samples[:3]]

    def test_server_errors_retry_up_to_limit(self, tmp_path):
        endpoint = FakeEndpoint(failures=[FakeResponse(503)] * 10)
        client, sleeps = _client(tmp_path, endpoint, retry_limit=2)
        with pytest.raises(EndpointUnavailable) as info:
            client.fetch_transaction(gen_benign_transfer(0).signature)
        assert endpoint.calls['getTransaction'] == 3
        assert info.value.attempts == 3
        assert sleeps == [0.25, 0.5]

    def test_recovers_after_transient_failure(self, tmp_path):
        sample = gen_benign_transfer(1)
        endpoint = FakeEndpoint({sample.signature: sample.record.payload},
                                failures=[FakeResponse(502), rpc_error(-32005, 'behind')])
        client, sleeps = _client(tmp_path, endpoint, retry_limit=3)
        record = client.fetch_transaction(sample.signature)
        assert record.payload == sample.record.payload
        assert endpoint.calls['getTransaction'] == 3
        assert len(sleeps) == 2

    def test_rate_limited_after_retries(self, tmp_path):
        endpoint = FakeEndpoint(failures=[FakeResponse(429, headers={'Retry-After': '2'})] * 5)
        client, sleeps = _client(tmp_path, endpoint, retry_limit=1)
        with pytest.raises(RateLimited) as info:
            client.fetch_transaction(gen_benign_transfer(0).signature)
        assert info.value.retry_after == 2.0
        assert endpoint.calls['getTransaction'] == 2
        assert sleeps == [2.0]

    def test_client_error_not_retried(self, tmp_path):
        endpoint = FakeEndpoint(failures=[FakeResponse(403)])
        client, sleeps = _client(tmp_path, endpoint)
        with pytest.raises(EndpointUnavailable):
            client.fetch_transaction(gen_benign_transfer(0).signature)
        assert endpoint.total_calls == 1
        assert sleeps == []

    def test_rpc_error_not_retried(self, tmp_path):
        endpoint = FakeEndpoint(failures=[rpc_error(-32600, 'invalid request')])
        client, _ = _client(tmp_path, endpoint)
        with pytest.raises(RpcError) as info:
            client.fetch_transaction(gen_benign_transfer(0).signature)
        assert info.value.code == -32600
        assert endpoint.total_calls == 1

    def test_unknown_signature(self, tmp_path):
        client, _ = _client(tmp_path, FakeEndpoint())
        with pytest.raises(NotFound):
            client.fetch_transaction(gen_benign_transfer(0).signature)

    def test_invalid_params_is_not_found(self, tmp_path):
        client, _ = _client(tmp_path, FakeEndpoint(failures=[rpc_error(-32602)]))
        with pytest.raises(NotFound):
            client.fetch_transaction(gen_benign_transfer(0).signature)

    def test_batch_skips_unknown(self, tmp_path):
        known = _samples(3)
        missing = gen_benign_transfer(99)
        endpoint = FakeEndpoint({s.signature: s.record.payload for s in known})
        client, _ = _client(tmp_path, endpoint)
        signatures = [known[0].signature, missing.signature, known[1].signature,
                      known[2].signature]
        records = client.fetch_transactions(signatures)
        assert [r.signature for r in records] == [s.signature for s in known]

    def test_fetched_records_normalize(self, tmp_path):
        sample = gen_benign_transfer(5)
        client, _ = _client(tmp_path, FakeEndpoint({sample.signature: sample.record.payload}))
        assert normalize(client.fetch_transaction(sample.signature)) == sample.transaction


class TestIngestConfig:
    @pytest.mark.parametrize('field, value', [
        ('max_in_flight', 0),
        ('retry_limit', -1),
        ('backoff_base_ms', 0),
        ('signature_page_size', 1001),
    ])
    def test_rejects_bad_values(self, field, value):
        with pytest.raises(ValueError):
            IngestConfig(endpoint_url=ENDPOINT, **{field: value})

    def test_backoff_grows(self):
        config = IngestConfig(endpoint_url=ENDPOINT, backoff_base_ms=100)
        assert [config.backoff_seconds(i) for i in range(3)] == [0.1, 0.2, 0.4]

    def test_dict_round_trip(self):
        config = IngestConfig(endpoint_url=ENDPOINT, max_in_flight=2)
        assert IngestConfig.from_dict(config.to_dict()) == config
