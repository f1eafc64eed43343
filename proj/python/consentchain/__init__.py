"""Python bindings for the consent ledger core."""

import json

try:
    from . import _consentchain as _core
except ImportError:  # in-tree build: extension sits on PYTHONPATH directly
    import _consentchain as _core

__all__ = [
    "Gateway",
    "audit_forget_check",
    "audit_replay",
    "audit_scan_pii",
    "audit_verify_chain",
    "canonical_serialize",
    "compute_pair_key",
    "generate_scenario",
    "genesis_hash",
    "hash_block",
    "run_scenario",
    "sha256_hex",
    "validate_transaction",
]

compute_pair_key = _core.compute_pair_key
genesis_hash = _core.genesis_hash
audit_verify_chain = _core.audit_verify_chain
audit_replay = _core.audit_replay
audit_scan_pii = _core.audit_scan_pii
audit_forget_check = _core.audit_forget_check


def sha256_hex(data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    return _core.sha256_hex(bytes(data))


def canonical_serialize(obj):
    """Canonical JSON text for obj. Raises ValueError for floats."""
    return _core.canonicalize(json.dumps(obj, ensure_ascii=False))


def hash_block(block):
    return _core.hash_block(json.dumps(block))


def validate_transaction(tx):
    return _core.validate_transaction(json.dumps(tx))


def generate_scenario(seed, **kwargs):
    return json.loads(_core.generate_scenario(seed, **kwargs))


def run_scenario(scenario, out_dir=None):
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    return _core.run_scenario(text, None if out_dir is None else str(out_dir))


class Gateway:
    """REST operations without the HTTP layer. Each call returns (status, body)."""

    def __init__(self, data_dir=None, peers=4, quorum=None, hash_iterations=100000, seed=0, admin=None):
        self._gw = _core.Gateway(
            None if data_dir is None else str(data_dir), peers, quorum, hash_iterations, seed, admin
        )

    @staticmethod
    def _wrap(reply):
        status, body = reply
        return status, json.loads(body)

    def register_user(self, name, email, phone, location, password):
        body = {"name": name, "email": email, "phone": phone, "location": location, "password": password}
        return self._wrap(self._gw.register_user(json.dumps(body)))

    def register_company(self, name, password):
        return self._wrap(self._gw.register_company(json.dumps({"name": name, "password": password})))

    def login(self, principal, password):
        return self._wrap(self._gw.login(json.dumps({"principal": principal, "password": password})))

    def logout(self, token):
        return self._wrap(self._gw.logout(token))

    def me(self, token):
        return self._wrap(self._gw.me(token))

    def put_company_profile(self, token, description, contact_email):
        body = {"description": description, "contactEmail": contact_email}
        return self._wrap(self._gw.put_company_profile(token, json.dumps(body)))

    def accredit(self, token, company_id, accredited=True):
        return self._wrap(self._gw.accredit(token, company_id, json.dumps({"accredited": accredited})))

    def admin_list_companies(self, token):
        return self._wrap(self._gw.admin_list_companies(token))

    def list_companies(self, token):
        return self._wrap(self._gw.list_companies(token))

    def put_permission(self, token, company_id, name=False, email=False, phone=False, location=False):
        body = {"name": name, "email": email, "phone": phone, "location": location}
        return self._wrap(self._gw.put_permission(token, company_id, json.dumps(body)))

    def list_permissions(self, token):
        return self._wrap(self._gw.list_permissions(token))

    def permission_history(self, token, company_id):
        return self._wrap(self._gw.permission_history(token, company_id))

    def company_data(self, token):
        return self._wrap(self._gw.company_data(token))

    def delete_account(self, token, confirm):
        return self._wrap(self._gw.delete_account(token, json.dumps({"confirm": confirm})))

    def peer_state_hashes(self):
        return self._gw.peer_state_hashes()
