"""
Payload Normalizer

Maps a jsonParsed getTransaction result onto the transaction model:
instruction kinds from parsed type names, token balances joined by
(account, mint), inner instructions flattened after their parent.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

from ..txmodel import (
    NATIVE_DECIMALS,
    SYSTEM_PROGRAM,
    TOKEN_2022_PROGRAM,
    TOKEN_PROGRAM,
    Address,
    Asset,
    BalanceEntry,
    Instruction,
    InstructionKind,
    InvalidAddress,
    Transaction,
)
from .errors import MalformedPayload
from .records import RawTransactionRecord

logger = logging.getLogger(__name__)

TOKEN_PROGRAMS = (TOKEN_PROGRAM, TOKEN_2022_PROGRAM)

SYSTEM_TRANSFER_TYPES = ('transfer', 'transferWithSeed')
SYSTEM_ASSIGN_TYPES = ('assign', 'assignWithSeed')
SYSTEM_CREATE_TYPES = ('createAccount', 'createAccountWithSeed')
TOKEN_TRANSFER_TYPES = ('transfer', 'transferChecked')


def normalize_authority_type(value: str) -> str:
    """'accountOwner' and 'account owner' both become 'accountowner'."""
    return value.lower().replace(' ', '')


def _field(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise MalformedPayload(path, 'expected an object')
    if key not in obj or obj[key] is None:
        raise MalformedPayload(f"{path}.{key}", 'missing')
    return obj[key]


def _address(value: Any, path: str) -> Address:
    try:
        return Address(value)
    except InvalidAddress as e:
        raise MalformedPayload(path, e.reason) from None


def _optional_address(value: Any, path: str) -> Optional[Address]:
    if value is None or value == '':
        return None
    return _address(value, path)


def _integer(value: Any, path: str) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise MalformedPayload(path, f"not an integer: {value!r}") from None
    if number < 0:
        raise MalformedPayload(path, f"negative amount {number}")
    return number


def normalize(raw: RawTransactionRecord) -> Transaction:
    """
    Normalize a raw record into a Transaction.

    Args:
        raw: Record holding a jsonParsed getTransaction result

    Returns:
        The normalized Transaction

    Raises:
        MalformedPayload: with the JSON path of the offending element
    """
    try:
        return _normalize(raw)
    except ValueError as e:
        # the model rejected a value that passed the shape checks
        raise MalformedPayload('$', str(e)) from None


def _normalize(raw: RawTransactionRecord) -> Transaction:
    payload = raw.payload
    message = _field(_field(payload, 'transaction', '$'), 'message', '$.transaction')
    meta = _field(payload, 'meta', '$')

    signatures = _field(payload['transaction'], 'signatures', '$.transaction')
    if not isinstance(signatures, list) or not signatures:
        raise MalformedPayload('$.transaction.signatures', 'expected a non-empty list')
    signature = signatures[0]
    if signature != raw.signature:
        raise MalformedPayload('$.transaction.signatures[0]',
                               f"does not match record signature {raw.signature}")

    keys, signers = _account_keys(message)
    if not signers:
        raise MalformedPayload('$.transaction.message.accountKeys', 'no signer')

    balances = _native_balances(meta, keys)
    token_entries = _token_balances(meta, keys)
    balances.extend(token_entries)
    token_mints = {entry.account: entry.asset.mint for entry in token_entries}

    instructions = _instructions(message, meta, token_mints)

    logs = meta.get('logMessages') or []
    if not isinstance(logs, list):
        raise MalformedPayload('$.meta.logMessages', 'expected a list')

    return Transaction(
        signature=signature,
        slot=_integer(_field(payload, 'slot', '$'), '$.slot'),
        block_time=_integer(_field(payload, 'blockTime', '$'), '$.blockTime'),
        instructions=tuple(instructions),
        logs=tuple(str(line) for line in logs),
        balances=tuple(balances),
        signers=tuple(signers),
        fee_payer=signers[0],
        success=meta.get('err') is None,
        fee=_integer(meta.get('fee', 0), '$.meta.fee'),
        recent_blockhash=message.get('recentBlockhash'),
    )


def _account_keys(message: Dict) -> Tuple[List[Address], List[Address]]:
    entries = _field(message, 'accountKeys', '$.transaction.message')
    if not isinstance(entries, list):
        raise MalformedPayload('$.transaction.message.accountKeys', 'expected a list')

    keys: List[Address] = []
    signers: List[Address] = []
    header = message.get('header') or {}
    required = header.get('numRequiredSignatures', 1)
    for i, entry in enumerate(entries):
        path = f"$.transaction.message.accountKeys[{i}]"
        if isinstance(entry, str):
            # Legacy shape: signers are the first numRequiredSignatures keys
            key = _address(entry, path)
            is_signer = i < required
        else:
            key = _address(_field(entry, 'pubkey', path), f"{path}.pubkey")
            is_signer = bool(entry.get('signer', False))
        keys.append(key)
        if is_signer:
            signers.append(key)
    return keys, signers


def _native_balances(meta: Dict, keys: List[Address]) -> List[BalanceEntry]:
    pre = _field(meta, 'preBalances', '$.meta')
    post = _field(meta, 'postBalances', '$.meta')
    if len(pre) != len(keys) or len(post) != len(keys):
        raise MalformedPayload('$.meta.preBalances',
                               f"{len(pre)}/{len(post)} balances for {len(keys)} account keys")
    native = Asset.native()
    return [
        BalanceEntry(
            account=key,
            asset=native,
            pre=_integer(pre[i], f"$.meta.preBalances[{i}]"),
            post=_integer(post[i], f"$.meta.postBalances[{i}]"),
            decimals=NATIVE_DECIMALS,
        )
        for i, key in enumerate(keys)
    ]


def _token_balances(meta: Dict, keys: List[Address]) -> List[BalanceEntry]:
    """Join pre and post token balances by (account, mint); a missing side is 0."""
    joined: Dict[Tuple[Address, Address], Dict[str, Any]] = {}
    for side in ('preTokenBalances', 'postTokenBalances'):
        for i, item in enumerate(meta.get(side) or []):
            path = f"$.meta.{side}[{i}]"
            index = _integer(_field(item, 'accountIndex', path), f"{path}.accountIndex")
            if index >= len(keys):
                raise MalformedPayload(f"{path}.accountIndex", f"index {index} out of range")
            mint = _address(_field(item, 'mint', path), f"{path}.mint")
            ui_amount = _field(item, 'uiTokenAmount', path)
            amount = _integer(_field(ui_amount, 'amount', f"{path}.uiTokenAmount"),
                              f"{path}.uiTokenAmount.amount")
            decimals = _integer(ui_amount.get('decimals', 0), f"{path}.uiTokenAmount.decimals")
            owner = _optional_address(item.get('owner'), f"{path}.owner")

            slot = joined.setdefault((keys[index], mint), {
                'pre': 0, 'post': 0, 'decimals': decimals, 'owner': None,
            })
            slot['pre' if side == 'preTokenBalances' else 'post'] = amount
            # Pre-transaction owner wins; AAT rewrites the owner in post
            if slot['owner'] is None:
                slot['owner'] = owner

    return [
        BalanceEntry(
            account=account,
            asset=Asset(mint),
            pre=slot['pre'],
            post=slot['post'],
            decimals=slot['decimals'],
            owner=slot['owner'],
        )
        for (account, mint), slot in joined.items()
    ]


def _instructions(message: Dict, meta: Dict,
                  token_mints: Dict[Address, Address]) -> List[Instruction]:
    top_level = _field(message, 'instructions', '$.transaction.message')
    inner_by_index: Dict[int, List[Tuple[Dict, str]]] = {}
    for i, group in enumerate(meta.get('innerInstructions') or []):
        path = f"$.meta.innerInstructions[{i}]"
        index = _integer(_field(group, 'index', path), f"{path}.index")
        for j, item in enumerate(group.get('instructions') or []):
            inner_by_index.setdefault(index, []).append((item, f"{path}.instructions[{j}]"))

    flattened: List[Instruction] = []
    for i, item in enumerate(top_level):
        flattened.append(_instruction(item, 0, f"$.transaction.message.instructions[{i}]",
                                      token_mints))
        for inner, path in inner_by_index.get(i, []):
            height = inner.get('stackHeight')
            depth = height - 1 if isinstance(height, int) and height > 1 else 1
            flattened.append(_instruction(inner, depth, path, token_mints))
    return flattened


def _instruction(item: Dict, depth: int, path: str,
                 token_mints: Dict[Address, Address]) -> Instruction:
    try:
        return _build_instruction(item, depth, path, token_mints)
    except ValueError as e:
        raise MalformedPayload(path, str(e)) from None


def _build_instruction(item: Dict, depth: int, path: str,
                       token_mints: Dict[Address, Address]) -> Instruction:
    program = _address(_field(item, 'programId', path), f"{path}.programId")
    parsed = item.get('parsed')

    if parsed is None:
        return Instruction(program=program, kind=InstructionKind.OTHER, depth=depth,
                           name='unparsed')
    if isinstance(parsed, str):
        # spl-memo and friends parse to a bare string
        label = str(item.get('program') or 'unknown')
        name = label[4:] if label.startswith('spl-') else label
        return Instruction(program=program, kind=InstructionKind.OTHER, depth=depth, name=name)

    kind_name = _field(parsed, 'type', f"{path}.parsed")
    info = parsed.get('info') or {}
    info_path = f"{path}.parsed.info"

    if program == SYSTEM_PROGRAM:
        if kind_name in SYSTEM_TRANSFER_TYPES:
            return Instruction(
                program=program,
                kind=InstructionKind.TRANSFER,
                source=_address(_field(info, 'source', info_path), f"{info_path}.source"),
                destination=_address(_field(info, 'destination', info_path),
                                     f"{info_path}.destination"),
                amount=_integer(_field(info, 'lamports', info_path), f"{info_path}.lamports"),
                depth=depth,
            )
        if kind_name in SYSTEM_ASSIGN_TYPES:
            return Instruction(
                program=program,
                kind=InstructionKind.ASSIGN,
                source=_address(_field(info, 'account', info_path), f"{info_path}.account"),
                new_authority=_address(_field(info, 'owner', info_path), f"{info_path}.owner"),
                depth=depth,
            )
        if kind_name == 'advanceNonce':
            return Instruction(
                program=program,
                kind=InstructionKind.ADVANCE_NONCE,
                source=_optional_address(info.get('nonceAccount'), f"{info_path}.nonceAccount"),
                authority=_optional_address(info.get('nonceAuthority'),
                                            f"{info_path}.nonceAuthority"),
                depth=depth,
            )
        if kind_name in SYSTEM_CREATE_TYPES:
            return Instruction(
                program=program,
                kind=InstructionKind.CREATE_ACCOUNT,
                source=_optional_address(info.get('source'), f"{info_path}.source"),
                destination=_optional_address(info.get('newAccount'), f"{info_path}.newAccount"),
                amount=_integer(info.get('lamports', 0), f"{info_path}.lamports"),
                new_authority=_optional_address(info.get('owner'), f"{info_path}.owner"),
                depth=depth,
            )

    elif program in TOKEN_PROGRAMS:
        if kind_name in TOKEN_TRANSFER_TYPES:
            source = _address(_field(info, 'source', info_path), f"{info_path}.source")
            destination = _address(_field(info, 'destination', info_path),
                                   f"{info_path}.destination")
            if kind_name == 'transferChecked':
                mint = _address(_field(info, 'mint', info_path), f"{info_path}.mint")
                token_amount = _field(info, 'tokenAmount', info_path)
                amount = _integer(_field(token_amount, 'amount', f"{info_path}.tokenAmount"),
                                  f"{info_path}.tokenAmount.amount")
            else:
                mint = token_mints.get(source) or token_mints.get(destination)
                amount = _integer(_field(info, 'amount', info_path), f"{info_path}.amount")
            return Instruction(
                program=program,
                kind=InstructionKind.TRANSFER,
                source=source,
                destination=destination,
                amount=amount,
                mint=mint,
                authority=_optional_address(
                    info.get('authority') or info.get('multisigAuthority'),
                    f"{info_path}.authority"),
                depth=depth,
            )
        if kind_name == 'setAuthority':
            target = info.get('account') or info.get('mint')
            if target is None:
                raise MalformedPayload(f"{info_path}.account", 'missing')
            return Instruction(
                program=program,
                kind=InstructionKind.SET_AUTHORITY,
                source=_address(target, f"{info_path}.account"),
                authority_type=normalize_authority_type(
                    str(_field(info, 'authorityType', info_path))),
                new_authority=_optional_address(info.get('newAuthority'),
                                                f"{info_path}.newAuthority"),
                authority=_optional_address(
                    info.get('authority') or info.get('multisigAuthority'),
                    f"{info_path}.authority"),
                depth=depth,
            )

    logger.debug("unmodelled instruction %s at %s", kind_name, path)
    return Instruction(program=program, kind=InstructionKind.OTHER, depth=depth,
                       name=str(kind_name))
