"""
Well-known program and system account addresses.
"""

from .address import Address

SYSTEM_PROGRAM = Address('11111111111111111111111111111111')
COMPUTE_BUDGET_PROGRAM = Address('ComputeBudget111111111111111111111111111111')
NATIVE_LOADER = Address('NativeLoader1111111111111111111111111111111')
TOKEN_PROGRAM = Address('TokenkegQfeZyiNwAJbNbGKPFXCWuBvf9Ss623VQ5DA')
TOKEN_2022_PROGRAM = Address('TokenzQdBNbLqP5VEhdkAS6EPFLC1PHnBqCXEpPxuEb')
ASSOCIATED_TOKEN_PROGRAM = Address('ATokenGPvbdGVxr1b2hvZbsiqW5xWH25efTNsLJA8knL')
MEMO_PROGRAM = Address('MemoSq4gqABAXKb96qnH8TysNcWxMyWCqXgDLGmfcHr')

LAMPORTS_PER_SOL = 10 ** 9
NATIVE_DECIMALS = 9

# Program label used by parsed RPC encodings
PROGRAM_LABELS = {
    'system': SYSTEM_PROGRAM,
    'spl-token': TOKEN_PROGRAM,
    'spl-token-2022': TOKEN_2022_PROGRAM,
    'spl-associated-token-account': ASSOCIATED_TOKEN_PROGRAM,
    'spl-memo': MEMO_PROGRAM,
}
