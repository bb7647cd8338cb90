"""
Scenario Generators

One generator per transaction pattern. Each builds an RPC-shaped
payload, normalizes it and returns a Sample: the record, the
Transaction, its ground-truth Label and a truth dictionary the oracle
tests compare detections against (victim, phisher, drained entries,
mints, durable-nonce flag).

Every generator takes a numpy Generator or an integer seed.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ..ingest import RawTransactionRecord, normalize
from ..ingest.normalizer import normalize_authority_type
from ..rules import VANITY_PREFIX, default_official_allowlist, match_vanity
from ..rules.detectors import OWNER_AUTHORITY
from ..txmodel import COMPUTE_BUDGET_PROGRAM, NATIVE_KEY, NATIVE_LOADER, Address, Transaction
from .addresses import random_address, random_blockhash, random_signature, vanity_address
from .builder import DEFAULT_FEE, PayloadBuilder
from .labels import Label

RngLike = Union[np.random.Generator, int, None]

WINDOW_START = 1704067200  # 2024-01-01T00:00:00Z
WINDOW_END = 1719792000    # 2024-07-01T00:00:00Z
BASE_SLOT = 240_000_000
PROVENANCE = 'synthetic'

# Suffix used for generated impersonators; matches the 4-character rule pattern
ISA_SUFFIX = '11111'

USDC = Address('EPjFWdd5AufqSSqeM2qN1xzybapC8G4wEGGkZwyTDt1v')
USDT = Address('Es9vMFrzaCERmJfrF4H2FYD4KCoNkY11McCe8BenwNYB')
BONK = Address('DezXAZ8z7PnrnRJjz3wXBoRgixCa6xjnB7YaB1pPB263')
JUP = Address('JUPyiwrYJFskUPiHa7hkeR8VUtAeFoSYbKedZNsDvCN')
WIF = Address('EKpQGSJtjMFqKZ9KQanSqYXRcF8fBopzLHYxdM65zcjm')

# (mint, decimals), drawn with MINT_WEIGHTS
MINTS: Tuple[Tuple[Address, int], ...] = ((USDC, 6), (USDT, 6), (BONK, 5), (JUP, 6), (WIF, 6))
MINT_WEIGHTS = (0.4, 0.2, 0.15, 0.15, 0.1)

# Programs the synthetic market scenarios trade through; config/markets.json lists them too
MARKET_PROGRAMS: Tuple[Address, ...] = (
    Address('JUP6LkbZbjS1jKKwapdHNy74zcZ3tLUZoi5QNyVTaV4'),   # Jupiter aggregator v6
    Address('675kPX9MHTjS2zt1qfr1NYHuzeLXfQM9H24wFSUt1Mp8'),  # Raydium AMM v4
    Address('whirLbMiicVdio4qvUfM5KAg6Ct8VwpYzGff3uctyCc'),   # Orca Whirlpool
    Address('PhoeNiXZ8ByJGLkxNfZRnkUfjvmuYqLR89jjFHGqdXY'),   # Phoenix
    Address('M2mx93ekt1fmXSVkTrUL9xVFHkmME8HTUi5Cyc5aF7K'),   # Magic Eden v2
    Address('TSWAPaqyCSx2KABk68Shruf4rp7CxcNi8hAsbdwmHbN'),   # Tensor swap
)

JITO_TIP_ROUTER = Address('RouterBmuRBkPUbgEDMtdvTZ75GBdSREZR5uGUxxxpb')

AAT_KINDS = ('wallet', 'token', 'both')
CONTROL_KINDS = ('close_account', 'official_beneficiary', 'partial_vanity',
                 'two_transfer_drain', 'single_drain', 'failed_drain')


@dataclass
class Sample:
    """
    One generated transaction and its ground truth.

    Unpacks as (transaction, label).
    """
    record: RawTransactionRecord
    transaction: Transaction
    label: Label
    truth: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self) -> Iterator:
        return iter((self.transaction, self.label))

    @property
    def signature(self) -> str:
        return self.transaction.signature


def as_rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def slot_at(block_time: int) -> int:
    """Approximate slot for a block time (2.5 slots per second)."""
    return BASE_SLOT + max(0, block_time - WINDOW_START) * 5 // 2


def amount(rng: np.random.Generator, low_exp: float = 3, high_exp: float = 12) -> int:
    """Log-uniform base units in [10**low_exp, 10**high_exp)."""
    return int(10 ** rng.uniform(low_exp, high_exp))


def wallet_lamports(rng: np.random.Generator) -> int:
    """0.01 to 100 SOL."""
    return amount(rng, 7, 11)


def pick_mints(rng: np.random.Generator, n: int) -> List[Tuple[Address, int]]:
    """n distinct (mint, decimals) pairs, USDC most likely."""
    if not 0 <= n <= len(MINTS):
        raise ValueError(f"can draw 0-{len(MINTS)} mints, asked for {n}")
    picks = rng.choice(len(MINTS), size=n, replace=False, p=MINT_WEIGHTS)
    return [MINTS[int(i)] for i in picks]


def _part(rng: np.random.Generator, total: int) -> int:
    # Strictly between 0 and total
    return int(rng.integers(1, total))


def _existing(rng: np.random.Generator) -> int:
    return 0 if rng.random() < 0.5 else amount(rng)


def _builder(rng: np.random.Generator, fee_payer: str, block_time: Optional[int]) -> PayloadBuilder:
    if block_time is None:
        block_time = int(rng.integers(WINDOW_START, WINDOW_END))
    return PayloadBuilder(random_signature(rng), fee_payer, block_time, slot_at(block_time),
                          random_blockhash(rng))


def _maybe_compute_budget(rng: np.random.Generator, builder: PayloadBuilder):
    if rng.random() < 0.5:
        builder.compute_unit_limit(int(rng.integers(50_000, 400_000)))


def _finish(builder: PayloadBuilder, label: Label, **truth) -> Sample:
    record = builder.build(PROVENANCE)
    return Sample(record=record, transaction=normalize(record), label=label, truth=truth)


def gen_benign_transfer(rng: RngLike = None, block_time: Optional[int] = None,
                        n_transfers: Optional[int] = None, sender: Optional[str] = None,
                        recipient: Optional[str] = None) -> Sample:
    """
    One or two partial transfers between ordinary wallets. Nothing is
    drained and no address looks like a system account.
    """
    rng = as_rng(rng)
    sender = Address(sender) if sender else random_address(rng)
    recipient = Address(recipient) if recipient else random_address(rng)
    n = n_transfers if n_transfers is not None else int(rng.integers(1, 3))
    if not 1 <= n <= 2:
        raise ValueError(f"benign transfers carry 1-2 transfers, got {n}")

    b = _builder(rng, sender, block_time)
    b.wallet(sender, wallet_lamports(rng), signer=True)
    _maybe_compute_budget(rng, b)
    mints = pick_mints(rng, n)
    for i in range(n):
        if i == 0 and rng.random() < 0.6:
            b.wallet(recipient, _existing(rng))
            b.system_transfer(sender, recipient, _part(rng, b.lamports(sender) - DEFAULT_FEE))
        else:
            mint, decimals = mints[i]
            held = amount(rng)
            source = b.token_account(random_address(rng), mint, sender, held, decimals)
            target = b.token_account(random_address(rng), mint, recipient, _existing(rng),
                                     decimals)
            b.token_transfer(source, target, _part(rng, held), sender,
                             checked=bool(rng.random() < 0.7))
    return _finish(b, Label.BENIGN, variant='transfer', victim=None, phisher=None,
                   sender=str(sender), recipient=str(recipient), mints=[])


def gen_market_swap(rng: RngLike = None, block_time: Optional[int] = None,
                    variant: Optional[str] = None) -> Sample:
    """
    Market activity the prerequisites must reject.

    Variants:
        swap: DEX swap whose log announces a Buy or Sell
        route: aggregator sweeping several tokens into market vaults
        nft: NFT listing handing the token account to a marketplace (SetAuthority)
    """
    rng = as_rng(rng)
    variant = variant or ('swap', 'route', 'nft')[int(rng.integers(0, 3))]
    user = random_address(rng)
    market = MARKET_PROGRAMS[int(rng.integers(0, len(MARKET_PROGRAMS)))]
    b = _builder(rng, user, block_time)
    b.wallet(user, wallet_lamports(rng), signer=True)
    b.program(market)

    if variant == 'swap':
        (mint_in, dec_in), (mint_out, dec_out) = pick_mints(rng, 2)
        held = amount(rng)
        user_in = b.token_account(random_address(rng), mint_in, user, held, dec_in)
        user_out = b.token_account(random_address(rng), mint_out, user, _existing(rng), dec_out)
        vault_in = b.token_account(random_address(rng), mint_in, market, amount(rng), dec_in)
        received = amount(rng)
        vault_out = b.token_account(random_address(rng), mint_out, market,
                                    received + amount(rng), dec_out)
        side = 'Buy' if rng.random() < 0.5 else 'Sell'
        ix = b.invoke(market, side, [user_in, vault_in, user_out, vault_out])
        b.token_transfer(user_in, vault_in, _part(rng, held), user, parent=ix)
        b.token_transfer(vault_out, user_out, received, market, parent=ix)
        expected_reject = 'log_keyword'
    elif variant == 'route':
        drained = int(rng.integers(2, 4))
        ix = b.invoke(market, 'Route')
        for i, (mint, decimals) in enumerate(pick_mints(rng, 3)):
            held = amount(rng)
            source = b.token_account(random_address(rng), mint, user, held, decimals)
            vault = b.token_account(random_address(rng), mint, market, _existing(rng), decimals)
            b.token_transfer(source, vault, held if i < drained else _part(rng, held), user,
                             parent=ix)
        expected_reject = 'beneficiary_market'
    elif variant == 'nft':
        nft = b.token_account(random_address(rng), random_address(rng), user, 1, 0)
        ix = b.invoke(market, 'List', [nft])
        b.set_authority(nft, market, user, parent=ix)
        expected_reject = 'beneficiary_market'
    else:
        raise ValueError(f"unknown market variant {variant!r}")

    return _finish(b, Label.MARKET, variant=variant, market=str(market), victim=None,
                   phisher=None, mints=[], expected_reject=expected_reject,
                   family='AuthorityLike' if variant == 'nft' else 'TransferLike')


def gen_self_dealing(rng: RngLike = None, block_time: Optional[int] = None,
                     n_tokens: Optional[int] = None) -> Sample:
    """
    One owner consolidating tokens into fresh accounts of its own:
    STMT-shaped, loser and beneficiary are the same wallet.
    """
    rng = as_rng(rng)
    n = n_tokens if n_tokens is not None else int(rng.integers(2, 4))
    if not 2 <= n <= len(MINTS):
        raise ValueError(f"self-dealing drains 2-{len(MINTS)} tokens, got {n}")
    owner = random_address(rng)
    b = _builder(rng, owner, block_time)
    b.wallet(owner, wallet_lamports(rng), signer=True)
    _maybe_compute_budget(rng, b)
    for i, (mint, decimals) in enumerate(pick_mints(rng, max(n, 3))):
        held = amount(rng)
        old = b.token_account(random_address(rng), mint, owner, held, decimals)
        new = b.token_account(random_address(rng), mint, owner, 0, decimals)
        b.token_transfer(old, new, held if i < n else _part(rng, held), owner)
    return _finish(b, Label.SELF_DEALING, variant='consolidate', victim=None, phisher=None,
                   owner=str(owner), mints=[], expected_reject='self_dealing')


def gen_stmt_phish(rng: RngLike = None, n_tokens: int = 4, durable_nonce: bool = False,
                   block_time: Optional[int] = None, phisher: Optional[str] = None,
                   victim: Optional[str] = None, include_native: bool = True,
                   drained_tokens: Optional[int] = None, inner: Optional[bool] = None,
                   failed: bool = False) -> Sample:
    """
    A drainer emptying several of the victim's token accounts in one go.

    Args:
        rng: Generator or seed
        n_tokens: Token accounts moved to the phisher
        durable_nonce: Prepend an AdvanceNonce instruction
        block_time: Fixed time; random within the window when omitted
        phisher: Beneficiary wallet; random when omitted
        victim: Signing wallet; random when omitted
        include_native: Also move part of the victim's SOL
        drained_tokens: How many of the token accounts are emptied (default all)
        inner: Route the transfers through a drainer program (random when None)
        failed: Mark the transaction failed (negative control)

    Returns:
        Sample labeled STMT when the rule conditions hold, else Benign
    """
    rng = as_rng(rng)
    drained_tokens = n_tokens if drained_tokens is None else drained_tokens
    if not 1 <= n_tokens <= len(MINTS) or not 0 <= drained_tokens <= n_tokens:
        raise ValueError(f"bad token counts: n_tokens={n_tokens}, drained={drained_tokens}")
    victim = Address(victim) if victim else random_address(rng)
    phisher = Address(phisher) if phisher else random_address(rng)

    b = _builder(rng, victim, block_time)
    b.wallet(victim, wallet_lamports(rng), signer=True)
    if durable_nonce:
        b.advance_nonce(random_address(rng), victim)
    _maybe_compute_budget(rng, b)
    use_inner = bool(rng.random() < 0.5) if inner is None else inner
    parent = b.invoke(random_address(rng), 'Claim') if use_inner else None

    mints = pick_mints(rng, n_tokens)
    drained = []
    for i, (mint, decimals) in enumerate(mints):
        held = amount(rng)
        source = b.token_account(random_address(rng), mint, victim, held, decimals)
        target = b.token_account(random_address(rng), mint, phisher, _existing(rng), decimals)
        moved = held if i < drained_tokens else _part(rng, held)
        b.token_transfer(source, target, moved, victim, checked=bool(rng.random() < 0.8),
                         parent=parent)
        if moved == held:
            drained.append([str(source), str(mint)])
    if include_native:
        b.wallet(phisher, wallet_lamports(rng))
        b.system_transfer(victim, phisher, _part(rng, b.lamports(victim) - DEFAULT_FEE),
                          parent=parent)
    if failed:
        b.fail()

    transfers = n_tokens + int(include_native)
    fires = not failed and transfers >= 3 and drained_tokens >= 2
    assets = ([NATIVE_KEY] if include_native else []) + [str(m) for m, _ in mints]
    return _finish(b, Label.STMT if fires else Label.BENIGN, variant='stmt',
                   victim=str(victim), phisher=str(phisher), drained=drained,
                   mints=[str(m) for m, _ in mints], assets=assets,
                   transfers=transfers, durable_nonce=durable_nonce)


def gen_aat_phish(rng: RngLike = None, kind: str = 'wallet', authority_type: str = 'accountOwner',
                  block_time: Optional[int] = None, phisher: Optional[str] = None,
                  victim: Optional[str] = None, durable_nonce: bool = False) -> Sample:
    """
    Account authority transfer.

    Args:
        rng: Generator or seed
        kind: 'wallet' (Assign the victim's wallet to a program), 'token'
            (SetAuthority on a token account) or 'both' (Assign followed by
            a SetAuthority issued through the phishing program)
        authority_type: SetAuthority type; anything but accountOwner makes
            the token step harmless
        block_time: Fixed time; random within the window when omitted
        phisher: Program (wallet/both) or new owner (token); random when omitted
        victim: Signing wallet
        durable_nonce: Prepend an AdvanceNonce instruction
    """
    rng = as_rng(rng)
    kind = kind.lower()
    if kind not in AAT_KINDS:
        raise ValueError(f"kind must be one of {AAT_KINDS}, got {kind!r}")
    victim = Address(victim) if victim else random_address(rng)
    phisher = Address(phisher) if phisher else random_address(rng)
    owner_change = normalize_authority_type(authority_type) == OWNER_AUTHORITY

    b = _builder(rng, victim, block_time)
    b.wallet(victim, wallet_lamports(rng), signer=True)
    if durable_nonce:
        b.advance_nonce(random_address(rng), victim)

    mints: List[str] = []
    assets: List[str] = []
    reassignments = 0
    if kind == 'wallet':
        b.assign(victim, phisher)
        assets.append(NATIVE_KEY)
        reassignments = 1
    else:
        mint, decimals = pick_mints(rng, 1)[0]
        account = b.token_account(random_address(rng), mint, victim, amount(rng), decimals)
        if kind == 'token':
            b.set_authority(account, phisher, victim, authority_type)
        else:
            b.assign(victim, phisher)
            assets.append(NATIVE_KEY)
            reassignments = 1
            ix = b.invoke(phisher, 'Claim', [account])
            b.set_authority(account, random_address(rng), victim, authority_type, parent=ix)
        if owner_change:
            # Token account rent travels with the account
            mints.append(str(mint))
            if NATIVE_KEY not in assets:
                assets.append(NATIVE_KEY)
            assets.append(str(mint))
            reassignments += 1

    wallet_hit = kind in ('wallet', 'both')
    token_hit = kind in ('token', 'both') and owner_change
    if wallet_hit and token_hit:
        label = Label.AAT_BOTH
    elif wallet_hit:
        label = Label.AAT_WALLET
    elif token_hit:
        label = Label.AAT_TOKEN
    else:
        label = Label.BENIGN
    return _finish(b, label, variant=f"aat_{kind}", victim=str(victim), phisher=str(phisher),
                   mints=mints, assets=assets, reassignments=reassignments,
                   durable_nonce=durable_nonce)


def gen_isa_phish(rng: RngLike = None, branch: Optional[str] = None, drain: str = 'token',
                  phisher: Optional[str] = None, partial: bool = False,
                  block_time: Optional[int] = None, victim: Optional[str] = None) -> Sample:
    """
    Victim pays an address dressed up as a system account.

    Args:
        rng: Generator or seed
        branch: 'prefix' ('Compu...') or 'suffix' ('...11111'); random when omitted
        drain: 'token' empties a token account, 'sol' empties the wallet
            (the transfer leaves exactly the fee)
        phisher: Beneficiary; a fresh vanity address when omitted. An
            official account here is the allowlist negative control.
        partial: Move only part of the balance (negative control)
        block_time: Fixed time; random within the window when omitted
        victim: Signing wallet
    """
    rng = as_rng(rng)
    if drain not in ('token', 'sol'):
        raise ValueError(f"drain must be 'token' or 'sol', got {drain!r}")
    if phisher is None:
        branch = branch or ('prefix' if rng.random() < 0.5 else 'suffix')
        if branch == 'prefix':
            phisher = vanity_address(rng, prefix=VANITY_PREFIX)
        elif branch == 'suffix':
            phisher = vanity_address(rng, suffix=ISA_SUFFIX)
        else:
            raise ValueError(f"branch must be 'prefix' or 'suffix', got {branch!r}")
    phisher = Address(phisher)
    victim = Address(victim) if victim else random_address(rng)

    b = _builder(rng, victim, block_time)
    mints: List[str] = []
    if drain == 'sol':
        held = wallet_lamports(rng)
        b.wallet(victim, held + DEFAULT_FEE, signer=True)
        b.wallet(phisher, _existing(rng))
        b.system_transfer(victim, phisher, _part(rng, held) if partial else held)
        assets = [NATIVE_KEY]
    else:
        b.wallet(victim, wallet_lamports(rng), signer=True)
        mint, decimals = pick_mints(rng, 1)[0]
        held = amount(rng)
        source = b.token_account(random_address(rng), mint, victim, held, decimals)
        target = b.token_account(random_address(rng), mint, phisher, 0, decimals)
        b.token_transfer(source, target, _part(rng, held) if partial else held, victim)
        mints.append(str(mint))
        assets = [str(mint)]

    fires = not partial and match_vanity(phisher, default_official_allowlist())
    return _finish(b, Label.ISA if fires else Label.BENIGN, variant=f"isa_{drain}",
                   victim=str(victim), phisher=str(phisher), branch=branch, mints=mints,
                   assets=assets)


def gen_jito_router_assign(rng: RngLike = None, block_time: Optional[int] = None) -> Sample:
    """
    A fee payer funds a fresh tip account and assigns it to the Jito tip
    router. Benign, but the AAT rule fires unless the router is listed
    as a benign program.
    """
    rng = as_rng(rng)
    payer = random_address(rng)
    tip_account = random_address(rng)
    b = _builder(rng, payer, block_time)
    b.wallet(payer, wallet_lamports(rng), signer=True)
    b.wallet(tip_account, 0, signer=True)
    b.system_transfer(payer, tip_account, 890_880)
    b.assign(tip_account, JITO_TIP_ROUTER)
    return _finish(b, Label.BENIGN, variant='jito_router', victim=None, phisher=None,
                   program=str(JITO_TIP_ROUTER), mints=[], expected_reject='benign_program')


def gen_benign_control(rng: RngLike = None, block_time: Optional[int] = None,
                       kind: Optional[str] = None) -> Sample:
    """
    A near miss of one phishing rule, labeled Benign.

    Kinds:
        close_account: SetAuthority with type closeAccount
        official_beneficiary: SOL drained into an official account
        partial_vanity: partial payment to a vanity address
        two_transfer_drain: two tokens drained with only two transfers
        single_drain: three transfers but only one token drained
        failed_drain: a full STMT drain that failed on chain
    """
    rng = as_rng(rng)
    kind = kind or CONTROL_KINDS[int(rng.integers(0, len(CONTROL_KINDS)))]
    if kind == 'close_account':
        sample = gen_aat_phish(rng, 'token', authority_type='closeAccount', block_time=block_time)
    elif kind == 'official_beneficiary':
        official = (COMPUTE_BUDGET_PROGRAM, NATIVE_LOADER)[int(rng.integers(0, 2))]
        sample = gen_isa_phish(rng, drain='sol', phisher=official, block_time=block_time)
    elif kind == 'partial_vanity':
        sample = gen_isa_phish(rng, partial=True, block_time=block_time)
    elif kind == 'two_transfer_drain':
        sample = gen_stmt_phish(rng, n_tokens=2, include_native=False, block_time=block_time)
    elif kind == 'single_drain':
        sample = gen_stmt_phish(rng, n_tokens=3, drained_tokens=1, block_time=block_time)
    elif kind == 'failed_drain':
        sample = gen_stmt_phish(rng, n_tokens=3, failed=True, block_time=block_time)
    else:
        raise ValueError(f"unknown control {kind!r}")
    if sample.label is not Label.BENIGN:
        raise AssertionError(f"control {kind} generated a {sample.label.value} sample")
    sample.truth['variant'] = f"control_{kind}"
    return sample


def gen_program_activity(rng: RngLike, program: str, block_time: int) -> Sample:
    """A random user calling program; history filler for phishing programs."""
    rng = as_rng(rng)
    user = random_address(rng)
    b = _builder(rng, user, block_time)
    b.wallet(user, wallet_lamports(rng), signer=True)
    b.invoke(program, 'Claim')
    return _finish(b, Label.BENIGN, variant='activity', victim=None, phisher=None, mints=[])

