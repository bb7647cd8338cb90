"""
Payload Builder

Assembles jsonParsed getTransaction payloads the same shape an RPC node
returns, so synthetic transactions go through the real normalizer.
Balances are tracked while instructions are added: every transfer
moves funds between the pre and post tables and the fee is charged
to the fee payer at build time.
"""

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from typing import Any, Dict, List, Optional

import base58

from ..ingest import RawTransactionRecord
from ..txmodel import COMPUTE_BUDGET_PROGRAM, SYSTEM_PROGRAM, TOKEN_PROGRAM

DEFAULT_FEE = 5000
TOKEN_ACCOUNT_RENT = 2_039_280
NONCE_ACCOUNT_RENT = 1_447_680
PROGRAM_LAMPORTS = 1_141_440
RECENT_BLOCKHASHES_SYSVAR = 'SysvarRecentB1ockHashes11111111111111111111'
FETCH_DELAY = timedelta(seconds=90)


@dataclass
class _TokenAccount:
    mint: str
    owner: str
    decimals: int
    pre: int
    post: int
    post_owner: str


def ui_amount_string(amount: int, decimals: int) -> str:
    """Base units rendered the way uiAmountString is, e.g. 1500000/6 -> '1.5'"""
    if decimals == 0:
        return str(amount)
    whole, frac = divmod(amount, 10 ** decimals)
    text = f"{whole}.{frac:0{decimals}d}".rstrip('0')
    return text.rstrip('.')


def _ui_token_amount(amount: int, decimals: int) -> Dict[str, Any]:
    text = ui_amount_string(amount, decimals)
    return {
        'amount': str(amount),
        'decimals': decimals,
        'uiAmount': float(Decimal(text)),
        'uiAmountString': text,
    }


class PayloadBuilder:
    """
    Build one transaction payload instruction by instruction.

    Accounts must be registered (wallet, token_account, program) before
    an instruction names them; instructions given a parent index are
    recorded as inner instructions of that top-level instruction.
    """

    def __init__(self, signature: str, fee_payer: str, block_time: int, slot: int,
                 blockhash: str, fee: int = DEFAULT_FEE):
        self.signature = signature
        self.fee_payer = fee_payer
        self.block_time = block_time
        self.slot = slot
        self.blockhash = blockhash
        self.fee = fee
        self.failed = False
        self._keys: Dict[str, Dict[str, bool]] = {}
        self._lamports: Dict[str, List[int]] = {}
        self._tokens: Dict[str, _TokenAccount] = {}
        self._instructions: List[Dict[str, Any]] = []
        self._log_names: List[Optional[str]] = []
        self._inner: Dict[int, List[Dict[str, Any]]] = {}
        self._key(fee_payer, signer=True, writable=True)

    # Accounts

    def _key(self, address: str, signer: bool = False, writable: bool = False):
        flags = self._keys.setdefault(str(address), {'signer': False, 'writable': False})
        flags['signer'] = flags['signer'] or signer
        flags['writable'] = flags['writable'] or writable
        self._lamports.setdefault(str(address), [0, 0])

    def wallet(self, address: str, lamports: int, signer: bool = False) -> str:
        """Register a system account holding lamports before the transaction."""
        self._key(address, signer=signer, writable=True)
        self._lamports[str(address)] = [lamports, lamports]
        return address

    def program(self, address: str) -> str:
        if str(address) not in self._keys:
            self._key(address)
            self._lamports[str(address)] = [PROGRAM_LAMPORTS, PROGRAM_LAMPORTS]
        return address

    def token_account(self, account: str, mint: str, owner: str, amount: int,
                      decimals: int) -> str:
        """Register an SPL token account (and its rent lamports)."""
        self._key(account, writable=True)
        self._lamports[str(account)] = [TOKEN_ACCOUNT_RENT, TOKEN_ACCOUNT_RENT]
        self._tokens[str(account)] = _TokenAccount(str(mint), str(owner), decimals,
                                                   amount, amount, str(owner))
        self.program(TOKEN_PROGRAM)
        return account

    def lamports(self, address: str) -> int:
        """Current post-instruction lamports of an account."""
        return self._lamports[str(address)][1]

    # Instructions

    def _append(self, item: Dict[str, Any], log_name: Optional[str],
                parent: Optional[int]) -> int:
        if parent is None:
            item['stackHeight'] = None
            self._instructions.append(item)
            self._log_names.append(log_name)
            return len(self._instructions) - 1
        if not 0 <= parent < len(self._instructions):
            raise ValueError(f"no top-level instruction {parent}")
        item['stackHeight'] = 2
        self._inner.setdefault(parent, []).append(item)
        return parent

    def system_transfer(self, source: str, destination: str, lamports: int,
                        parent: Optional[int] = None) -> int:
        if self.lamports(source) < lamports:
            raise ValueError(f"{source} holds {self.lamports(source)} < {lamports} lamports")
        self._key(source, signer=True, writable=True)
        self._key(destination, writable=True)
        self._lamports[str(source)][1] -= lamports
        self._lamports[str(destination)][1] += lamports
        self.program(SYSTEM_PROGRAM)
        return self._append({
            'parsed': {'info': {'destination': str(destination), 'lamports': lamports,
                                'source': str(source)},
                       'type': 'transfer'},
            'program': 'system',
            'programId': str(SYSTEM_PROGRAM),
        }, 'Transfer' if parent is None else None, parent)

    def token_transfer(self, source: str, destination: str, amount: int, authority: str,
                       checked: bool = True, parent: Optional[int] = None) -> int:
        src, dst = self._tokens[str(source)], self._tokens[str(destination)]
        if src.mint != dst.mint:
            raise ValueError(f"mint mismatch {src.mint} -> {dst.mint}")
        if src.post < amount:
            raise ValueError(f"{source} holds {src.post} < {amount}")
        src.post -= amount
        dst.post += amount
        self._key(authority, signer=parent is None)
        if checked:
            info = {
                'authority': str(authority),
                'destination': str(destination),
                'mint': src.mint,
                'source': str(source),
                'tokenAmount': _ui_token_amount(amount, src.decimals),
            }
            kind = 'transferChecked'
        else:
            info = {'amount': str(amount), 'authority': str(authority),
                    'destination': str(destination), 'source': str(source)}
            kind = 'transfer'
        return self._append({
            'parsed': {'info': info, 'type': kind},
            'program': 'spl-token',
            'programId': str(TOKEN_PROGRAM),
        }, kind[0].upper() + kind[1:], parent)

    def assign(self, account: str, owner_program: str, parent: Optional[int] = None) -> int:
        self._key(account, signer=True, writable=True)
        self.program(SYSTEM_PROGRAM)
        self.program(owner_program)
        return self._append({
            'parsed': {'info': {'account': str(account), 'owner': str(owner_program)},
                       'type': 'assign'},
            'program': 'system',
            'programId': str(SYSTEM_PROGRAM),
        }, 'Assign', parent)

    def set_authority(self, account: str, new_authority: str, authority: str,
                      authority_type: str = 'accountOwner',
                      parent: Optional[int] = None) -> int:
        self._key(account, writable=True)
        self._key(authority, signer=parent is None)
        self._key(new_authority)
        if authority_type == 'accountOwner' and str(account) in self._tokens:
            self._tokens[str(account)].post_owner = str(new_authority)
        return self._append({
            'parsed': {'info': {'account': str(account), 'authority': str(authority),
                                'authorityType': authority_type,
                                'newAuthority': str(new_authority)},
                       'type': 'setAuthority'},
            'program': 'spl-token',
            'programId': str(TOKEN_PROGRAM),
        }, 'SetAuthority', parent)

    def advance_nonce(self, nonce_account: str, authority: str) -> int:
        self._key(nonce_account, writable=True)
        self._lamports[str(nonce_account)] = [NONCE_ACCOUNT_RENT, NONCE_ACCOUNT_RENT]
        self._key(authority, signer=True)
        self.program(RECENT_BLOCKHASHES_SYSVAR)
        self.program(SYSTEM_PROGRAM)
        return self._append({
            'parsed': {'info': {'nonceAccount': str(nonce_account),
                                'nonceAuthority': str(authority),
                                'recentBlockhashesSysvar': RECENT_BLOCKHASHES_SYSVAR},
                       'type': 'advanceNonce'},
            'program': 'system',
            'programId': str(SYSTEM_PROGRAM),
        }, None, None)

    def compute_unit_limit(self, units: int) -> int:
        """SetComputeUnitLimit; the RPC leaves it unparsed."""
        self.program(COMPUTE_BUDGET_PROGRAM)
        data = bytes([2]) + units.to_bytes(4, 'little')
        return self._append({
            'accounts': [],
            'data': base58.b58encode(data).decode('ascii'),
            'programId': str(COMPUTE_BUDGET_PROGRAM),
        }, None, None)

    def invoke(self, program: str, name: str, accounts: Optional[List[str]] = None) -> int:
        """Top-level call into a program the RPC cannot parse; returns its index."""
        self.program(program)
        for account in accounts or []:
            self._key(account)
        return self._append({
            'accounts': [str(a) for a in accounts or []],
            'data': base58.b58encode(name.encode('ascii')).decode('ascii'),
            'programId': str(program),
        }, name, None)

    def fail(self):
        """Mark the transaction as failed; only the fee is charged."""
        self.failed = True

    # Output

    def _ordered_keys(self) -> List[str]:
        keys = list(self._keys)
        keys.remove(self.fee_payer)

        def rank(address: str) -> int:
            flags = self._keys[address]
            if flags['signer']:
                return 0
            return 1 if flags['writable'] else 2

        return [self.fee_payer] + sorted(keys, key=lambda a: (rank(a), keys.index(a)))

    def _logs(self) -> List[str]:
        logs = []
        for i, item in enumerate(self._instructions):
            program = item['programId']
            logs.append(f"Program {program} invoke [1]")
            if self._log_names[i]:
                logs.append(f"Program log: Instruction: {self._log_names[i]}")
            for inner in self._inner.get(i, []):
                logs.append(f"Program {inner['programId']} invoke [2]")
                if inner.get('program') == 'spl-token':
                    kind = inner['parsed']['type']
                    logs.append(f"Program log: Instruction: {kind[0].upper()}{kind[1:]}")
                logs.append(f"Program {inner['programId']} success")
            if self.failed and i == len(self._instructions) - 1:
                logs.append(f"Program {program} failed: custom program error: 0x1")
            else:
                logs.append(f"Program {program} success")
        return logs

    def build(self, provenance: Optional[str] = None) -> RawTransactionRecord:
        """
        Freeze the payload into a raw record.

        Raises:
            ValueError: the fee payer cannot cover the fee
        """
        keys = self._ordered_keys()
        index = {key: i for i, key in enumerate(keys)}

        lamports = {k: list(v) for k, v in self._lamports.items()}
        tokens = {k: _TokenAccount(**vars(v)) for k, v in self._tokens.items()}
        if self.failed:
            for pair in lamports.values():
                pair[1] = pair[0]
            for account in tokens.values():
                account.post = account.pre
                account.post_owner = account.owner
        if lamports[self.fee_payer][1] < self.fee:
            raise ValueError(f"fee payer {self.fee_payer} cannot cover the fee")
        lamports[self.fee_payer][1] -= self.fee

        def token_side(pre: bool) -> List[Dict[str, Any]]:
            return [{
                'accountIndex': index[account],
                'mint': t.mint,
                'owner': t.owner if pre else t.post_owner,
                'programId': str(TOKEN_PROGRAM),
                'uiTokenAmount': _ui_token_amount(t.pre if pre else t.post, t.decimals),
            } for account, t in sorted(tokens.items(), key=lambda item: index[item[0]])]

        err = {'InstructionError': [len(self._instructions) - 1, {'Custom': 1}]} \
            if self.failed else None
        payload = {
            'blockTime': self.block_time,
            'meta': {
                'computeUnitsConsumed': 1500 * max(1, len(self._instructions)),
                'err': err,
                'fee': self.fee,
                'innerInstructions': [{'index': i, 'instructions': items}
                                      for i, items in sorted(self._inner.items())],
                'logMessages': self._logs(),
                'postBalances': [lamports[k][1] for k in keys],
                'postTokenBalances': token_side(False),
                'preBalances': [lamports[k][0] for k in keys],
                'preTokenBalances': token_side(True),
                'rewards': [],
                'status': {'Err': err} if self.failed else {'Ok': None},
            },
            'slot': self.slot,
            'transaction': {
                'message': {
                    'accountKeys': [{'pubkey': k, 'signer': self._keys[k]['signer'],
                                     'source': 'transaction',
                                     'writable': self._keys[k]['writable']} for k in keys],
                    'instructions': self._instructions,
                    'recentBlockhash': self.blockhash,
                },
                'signatures': [self.signature],
            },
            'version': 0,
        }
        fetched_at = datetime.fromtimestamp(self.block_time, tz=timezone.utc) + FETCH_DELAY
        return RawTransactionRecord(signature=self.signature, payload=payload,
                                    fetched_at=fetched_at, provenance=provenance)
