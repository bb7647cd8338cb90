"""
Tests for the transaction model: addresses, balances, instructions and roles.
"""

import base58
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solphish.txmodel import (
    SYSTEM_PROGRAM,
    Address,
    Asset,
    BalanceEntry,
    Instruction,
    InstructionKind,
    InvalidAddress,
    RoleUnderdetermined,
    RuleFamily,
    Transaction,
    derive_roles,
    drained_assets,
    holder_outflows,
    involved_accounts,
    is_valid_address,
    net_delta,
)

from conftest import (
    USDC,
    USDT,
    addr,
    assign,
    make_tx,
    native,
    set_owner,
    sol_transfer,
    stmt_drain,
    token,
    token_transfer,
)


class TestAddress:
    def test_system_accounts_are_valid(self):
        for value in ('11111111111111111111111111111111',
                      'ComputeBudget111111111111111111111111111111',
                      'NativeLoader1111111111111111111111111111111'):
            assert is_valid_address(value)

    @pytest.mark.parametrize('value', [
        '',
        'abc',
        # 33 ones decode to 33 bytes
        '111111111111111111111111111111111',
        # one 1 short of the native loader, 31 bytes
        'NativeLoader111111111111111111111111111111',
        # 0, O, I and l are not base58
        '0OIl' + '1' * 40,
    ])
    def test_rejects_invalid(self, value):
        assert not is_valid_address(value)
        with pytest.raises(InvalidAddress):
            Address(value)

    def test_rejects_non_strings(self):
        with pytest.raises(InvalidAddress):
            Address(42)

    def test_invalid_address_is_a_value_error(self):
        with pytest.raises(ValueError):
            Address('not an address')

    def test_optional_and_short(self):
        assert Address.optional(None) is None
        assert Address.optional('') is None
        assert Address('BNRThTYg9x49JYNkbDUYERb3X7JV2GYcEpFLAUHX5Rep').short() == 'BNRT...5Rep'

    def test_equal_to_plain_string(self):
        a = addr('x')
        assert a == str(a)
        assert {a: 1}[str(a)] == 1

    @settings(max_examples=50)
    @given(st.binary(min_size=32, max_size=32))
    def test_any_32_bytes_is_an_address(self, raw):
        text = base58.b58encode(raw).decode('ascii')
        assert Address(text) == text
        assert base58.b58decode(Address(text)) == raw


class TestBalances:
    def test_drained_and_delta(self):
        entry = token(addr('t'), USDC, addr('o'), 500, 0)
        assert entry.drained
        assert entry.delta == -500
        assert entry.holder == addr('o')

    def test_zero_to_zero_is_not_drained(self):
        assert not token(addr('t'), USDC, addr('o'), 0, 0).drained

    def test_native_holder_is_the_account(self):
        assert native(addr('w'), 10, 5).holder == addr('w')

    def test_negative_balance_rejected(self):
        with pytest.raises(ValueError):
            BalanceEntry(addr('w'), Asset.native(), -1, 0, 9)

    def test_native_decimals_fixed(self):
        with pytest.raises(ValueError):
            BalanceEntry(addr('w'), Asset.native(), 1, 0, 6)

    def test_asset_keys(self):
        assert Asset.native().key == 'NATIVE'
        assert Asset.from_key('NATIVE').is_native
        assert Asset.from_key(USDC) == Asset.token(USDC)


class TestInstruction:
    def test_transfer_needs_endpoints(self):
        with pytest.raises(ValueError):
            Instruction(SYSTEM_PROGRAM, InstructionKind.TRANSFER, source=addr('a'), amount=1)

    def test_negative_depth_rejected(self):
        with pytest.raises(ValueError):
            sol_transfer(addr('a'), addr('b'), 1, depth=-1)

    def test_other_needs_name(self):
        with pytest.raises(ValueError):
            Instruction(addr('p'), InstructionKind.OTHER)
        assert Instruction(addr('p'), InstructionKind.OTHER, name='Claim').label == 'Other(Claim)'

    def test_asset_of_transfers(self):
        assert sol_transfer(addr('a'), addr('b'), 1).asset == Asset.native()
        assert token_transfer(addr('a'), addr('b'), 1, USDC).asset == Asset.token(USDC)


class TestTransaction:
    def test_fee_payer_must_be_first_signer(self):
        with pytest.raises(ValueError):
            Transaction(signature='s', slot=1, block_time=1, instructions=[], logs=[],
                        balances=[], signers=[addr('a'), addr('b')], fee_payer=addr('b'),
                        success=True)

    def test_needs_a_signer(self):
        with pytest.raises(ValueError):
            Transaction(signature='s', slot=1, block_time=1, instructions=[], logs=[],
                        balances=[], signers=[], fee_payer=addr('a'), success=True)

    def test_lists_stored_as_tuples(self):
        tx = stmt_drain(addr('v'), addr('p'))
        assert isinstance(tx.instructions, tuple)
        assert isinstance(tx.balances, tuple)

    def test_views(self):
        victim, phisher = addr('v'), addr('p')
        tx = stmt_drain(victim, phisher)
        assert len(tx.transfers()) == 3
        assert tx.authority_changes() == []
        assert not tx.has_advance_nonce()
        assert len(tx.token_balances()) == 4
        assert net_delta(tx, victim, Asset.native()) == -1_000_000_000
        assert net_delta(tx, addr('nobody'), Asset.native()) == 0
        assert [asset.key for _, asset in drained_assets(tx)] == [USDC, USDT]
        assert tx.native_sum_matches_fee()

    def test_holder_outflows_exclude_fee(self):
        victim, other = addr('v'), addr('o')
        tx = make_tx([sol_transfer(victim, other, 1000)],
                     [native(victim, 10_000, 3_000), native(other, 0, 1000)],
                     [victim], fee=6000)
        [(entry, amount)] = holder_outflows(tx, victim)
        assert entry.account == victim
        assert amount == 1000
        assert tx.native_sum_matches_fee()

    def test_involved_accounts(self):
        victim, phisher = addr('v'), addr('p')
        tx = stmt_drain(victim, phisher, label='involved')
        involved = involved_accounts(tx)
        assert {victim, phisher, SYSTEM_PROGRAM, addr('involved-vu')} <= involved


class TestRoles:
    def test_transfer_like(self):
        victim, phisher = addr('v'), addr('p')
        roles = derive_roles(stmt_drain(victim, phisher), RuleFamily.TRANSFER_LIKE)
        assert roles.loser == victim
        assert roles.beneficiary == phisher
        assert roles.complete

    def test_tie_goes_to_fee_payer(self):
        payer, a, b = addr('payer'), addr('a'), addr('b')
        tx = make_tx([sol_transfer(payer, b, 5), sol_transfer(a, b, 5)],
                     [native(payer, 100, 95), native(a, 10, 5), native(b, 0, 10)],
                     [payer, a])
        roles = derive_roles(tx, RuleFamily.TRANSFER_LIKE)
        assert roles.loser == payer
        assert roles.beneficiary == b

    def test_tie_goes_to_smallest_address(self):
        payer, a, b = addr('payer'), addr('a'), addr('b')
        tx = make_tx([sol_transfer(payer, a, 5), sol_transfer(payer, b, 5)],
                     [native(payer, 100, 90), native(a, 0, 5), native(b, 0, 5)],
                     [payer])
        assert derive_roles(tx, RuleFamily.TRANSFER_LIKE).beneficiary == min(a, b)

    def test_token_accounts_fold_into_owners(self):
        victim, phisher = addr('v'), addr('p')
        roles = derive_roles(stmt_drain(victim, phisher), RuleFamily.TRANSFER_LIKE)
        assert roles.loser not in (addr('drain-vu'), addr('drain-vt'))

    def test_authority_like_assign(self):
        wallet, program = addr('w'), addr('program')
        tx = make_tx([assign(wallet, program)], [native(wallet, 10, 10)], [wallet])
        roles = derive_roles(tx, RuleFamily.AUTHORITY_LIKE)
        assert roles.loser == wallet
        assert roles.beneficiary == program
        assert roles.family is RuleFamily.AUTHORITY_LIKE

    def test_authority_like_set_authority_uses_first_change(self):
        wallet, account, first, second = addr('w'), addr('acct'), addr('n1'), addr('n2')
        tx = make_tx([set_owner(account, first, wallet), set_owner(account, second, first)],
                     [token(account, USDC, wallet, 50, 50)], [wallet])
        roles = derive_roles(tx, RuleFamily.AUTHORITY_LIKE)
        assert (roles.loser, roles.beneficiary) == (wallet, first)

    def test_authority_like_without_changes_is_empty(self):
        tx = stmt_drain(addr('v'), addr('p'))
        roles = derive_roles(tx, RuleFamily.AUTHORITY_LIKE)
        assert roles.loser is None and roles.beneficiary is None

    def test_nothing_moved_is_underdetermined(self):
        wallet = addr('w')
        tx = make_tx([], [native(wallet, 10, 10)], [wallet])
        with pytest.raises(RoleUnderdetermined):
            derive_roles(tx, RuleFamily.TRANSFER_LIKE)
