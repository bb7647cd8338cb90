"""
Phishing Detectors

One predicate set per phishing family. Each detector returns an
evidence dictionary when it fires and None otherwise; evidence values
are plain JSON types so detections serialize without conversion.
"""

from typing import Any, Dict, List, Optional

from ..txmodel import (
    InstructionKind,
    Roles,
    RuleFamily,
    Transaction,
    authorizer_of,
    derive_roles,
)
from .lists import OfficialAllowlist

STMT_MIN_TRANSFERS = 3
STMT_MIN_DRAINED_TOKENS = 2
OWNER_AUTHORITY = 'accountowner'
VANITY_PREFIX = 'Compu'
VANITY_SUFFIX = '1111'

Evidence = Dict[str, Any]


def _drained_pairs(entries) -> List[List[str]]:
    return [[str(e.account), e.asset.key] for e in entries if e.drained]


def detect_stmt(tx: Transaction) -> Optional[Evidence]:
    """
    Single transaction with multiple transfers.

    Fires when more than two Transfer instructions (any depth) move
    funds and at least two token balances drop from non-zero to zero.
    """
    transfers = tx.transfers()
    if len(transfers) < STMT_MIN_TRANSFERS:
        return None
    drained = _drained_pairs(tx.token_balances())
    if len(drained) < STMT_MIN_DRAINED_TOKENS:
        return None
    return {
        'transfer_count': len(transfers),
        'inner_transfers': sum(1 for ins in transfers if ins.depth > 0),
        'drained_count': len(drained),
        'drained': drained,
        'durable_nonce': tx.has_advance_nonce(),
    }


def detect_aat(tx: Transaction) -> Optional[Evidence]:
    """
    Account authority transfer.

    Fires on any Assign (wallet ownership handed to a program) and on
    any SetAuthority whose normalized type is 'accountowner' (token
    account ownership handed to another account).
    """
    reassignments = []
    for ins in tx.authority_changes():
        if ins.kind is InstructionKind.ASSIGN:
            scope = 'wallet'
        elif ins.authority_type == OWNER_AUTHORITY:
            scope = 'token'
        else:
            continue
        old_owner = authorizer_of(tx, ins)
        reassignments.append({
            'account': str(ins.source) if ins.source is not None else None,
            'old_owner': str(old_owner) if old_owner is not None else None,
            'new_owner': str(ins.new_authority) if ins.new_authority is not None else None,
            'scope': scope,
            'depth': ins.depth,
        })
    if not reassignments:
        return None
    scopes = {r['scope'] for r in reassignments}
    return {
        'reassignments': reassignments,
        'wallet_authority': 'wallet' in scopes,
        'token_authority': 'token' in scopes,
        'durable_nonce': tx.has_advance_nonce(),
    }


def vanity_branch(address: str, prefix: str = VANITY_PREFIX,
                  suffix: str = VANITY_SUFFIX) -> Optional[str]:
    """'prefix' or 'suffix' for the first pattern address matches, else None."""
    if address.startswith(prefix):
        return 'prefix'
    if address.endswith(suffix):
        return 'suffix'
    return None


def match_vanity(address: str, allowlist: OfficialAllowlist,
                 prefix: str = VANITY_PREFIX, suffix: str = VANITY_SUFFIX) -> bool:
    """
    True iff address starts with prefix or ends with suffix and is not an
    official account.

    Args:
        address: Address text; need not be a valid address
        allowlist: Official accounts exempt from the match
        prefix: Leading pattern (default 'Compu')
        suffix: Trailing pattern (default '1111')
    """
    if address in allowlist:
        return False
    return vanity_branch(address, prefix, suffix) is not None


def detect_isa(tx: Transaction, allowlist: OfficialAllowlist, roles: Optional[Roles] = None,
               prefix: str = VANITY_PREFIX, suffix: str = VANITY_SUFFIX) -> Optional[Evidence]:
    """
    Impersonation of system accounts.

    Fires when the transaction transfers funds, drains some token or SOL
    balance to zero and pays a beneficiary whose address imitates an
    official account.

    Args:
        tx: Transaction under test
        allowlist: Official accounts
        roles: TransferLike roles; derived when omitted
        prefix: Vanity prefix pattern
        suffix: Vanity suffix pattern
    """
    transfers = tx.transfers()
    if not transfers:
        return None
    drained = _drained_pairs(tx.balances)
    if not drained:
        return None
    if roles is None:
        roles = derive_roles(tx, RuleFamily.TRANSFER_LIKE)
    beneficiary = roles.beneficiary
    if beneficiary is None or not match_vanity(beneficiary, allowlist, prefix, suffix):
        return None
    return {
        'beneficiary': str(beneficiary),
        'vanity_match': True,
        'vanity_branch': vanity_branch(beneficiary, prefix, suffix),
        'transfer_count': len(transfers),
        'drained': drained,
        'durable_nonce': tx.has_advance_nonce(),
    }
