"""
Transaction Roles

Derives the loser (tx.from) and beneficiary (tx.to) of a transaction.
The rules read roles in two families: transfer-like (who lost funds,
who gained them) and authority-like (who held an account's authority,
who was handed it).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Set

from .address import Address
from .errors import RoleUnderdetermined
from .transaction import Instruction, InstructionKind, Transaction


class RuleFamily(Enum):
    """How tx.from / tx.to are read"""
    TRANSFER_LIKE = 'TransferLike'
    AUTHORITY_LIKE = 'AuthorityLike'


@dataclass(frozen=True)
class Roles:
    """Loser and beneficiary of a transaction under one rule family."""
    loser: Optional[Address] = None
    beneficiary: Optional[Address] = None
    family: RuleFamily = RuleFamily.TRANSFER_LIKE

    @property
    def complete(self) -> bool:
        return self.loser is not None and self.beneficiary is not None


def derive_roles(tx: Transaction, family: RuleFamily) -> Roles:
    """
    Derive the loser and beneficiary of a transaction.

    TransferLike: the loser is the holder with the most asset classes
    showing a strictly negative delta, the beneficiary the holder with
    the most asset classes showing a strictly positive delta. Ties go to
    the fee payer when it is among the tied holders, else to the
    lexicographically smallest address.

    AuthorityLike: the loser is the signer authorising the first
    Assign/SetAuthority, the beneficiary that instruction's new authority.

    Args:
        tx: Transaction to inspect
        family: Rule family the roles are read for

    Returns:
        Roles; a field is None when no account qualifies

    Raises:
        RoleUnderdetermined: no balance moved and no authority changed
    """
    changes = tx.authority_changes()
    moved = any(entry.delta != 0 for entry in tx.balances)
    if not moved and not changes:
        raise RoleUnderdetermined(tx.signature)

    if family is RuleFamily.AUTHORITY_LIKE:
        if not changes:
            return Roles(family=family)
        first = changes[0]
        return Roles(
            loser=authorizer_of(tx, first),
            beneficiary=first.new_authority,
            family=family,
        )

    losing: Dict[Address, Set[str]] = {}
    gaining: Dict[Address, Set[str]] = {}
    for entry in tx.balances:
        if entry.delta < 0:
            losing.setdefault(entry.holder, set()).add(entry.asset.key)
        elif entry.delta > 0:
            gaining.setdefault(entry.holder, set()).add(entry.asset.key)

    return Roles(
        loser=_most_classes(losing, tx.fee_payer),
        beneficiary=_most_classes(gaining, tx.fee_payer),
        family=family,
    )


def authorizer_of(tx: Transaction, ins: Instruction) -> Optional[Address]:
    """
    Pre-transaction owner of the account an authority change touches.

    An explicit authority wins; an Assign is signed by the wallet itself;
    a SetAuthority falls back to the owner recorded in the balance table.
    """
    if ins.authority is not None:
        return ins.authority
    if ins.kind is InstructionKind.ASSIGN:
        return ins.source
    if ins.source is not None:
        return tx.owner_of(ins.source) or ins.source
    return None


def _most_classes(classes: Dict[Address, Set[str]], fee_payer: Address) -> Optional[Address]:
    if not classes:
        return None
    best = max(len(assets) for assets in classes.values())
    tied = sorted(holder for holder, assets in classes.items() if len(assets) == best)
    if fee_payer in tied:
        return fee_payer
    return tied[0]
