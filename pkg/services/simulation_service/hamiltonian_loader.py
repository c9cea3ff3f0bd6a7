# hamiltonian_loader.py - File ingestion for externally generated Hamiltonians
# This file reads and writes the JSON grouped-Pauli format:
# {"n_qubits": int, "label": str, "groups": [[{"pauli": "IXYZ...", "coeff": real}, ...], ...]}

import json
import logging
import math
from pathlib import Path
from typing import Any, List, Union

from pydantic import ValidationError

from shared.utils.errors import HamiltonianFormatError
from .config import settings
from .models import PAULI_LETTERS, GroupedHamiltonian, PauliString

logger = logging.getLogger(__name__)

def _parse_coefficient(raw: Any, where: str) -> float:
    value = _read_coefficient(raw, where)
    if not math.isfinite(value):
        raise HamiltonianFormatError("parse failure", f"{where}: non-finite coefficient {raw!r}")
    return value

def _read_coefficient(raw: Any, where: str) -> float:
    if isinstance(raw, bool):
        raise HamiltonianFormatError("parse failure", f"{where}: boolean coefficient")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        text = raw.strip()
        try:
            return float(text)
        except ValueError:
            pass
        try:
            value = complex(text.replace("i", "j").replace(" ", ""))
        except ValueError:
            raise HamiltonianFormatError("parse failure", f"{where}: cannot read coefficient '{raw}'")
        if value.imag != 0.0:
            raise HamiltonianFormatError("non-real coefficient", f"{where}: '{raw}'")
        return value.real
    if isinstance(raw, dict) and "imag" in raw:
        if float(raw.get("imag", 0.0)) != 0.0:
            raise HamiltonianFormatError("non-real coefficient", f"{where}: {raw}")
        return float(raw.get("real", 0.0))
    raise HamiltonianFormatError("parse failure", f"{where}: unsupported coefficient {raw!r}")

def parse_hamiltonian(payload: Any) -> GroupedHamiltonian:
    """Validate a decoded payload; each failure class has its own reason."""
    if not isinstance(payload, dict):
        raise HamiltonianFormatError("parse failure", "top level must be an object")
    try:
        n_qubits = int(payload["n_qubits"])
        raw_groups = payload["groups"]
    except (KeyError, TypeError, ValueError) as e:
        raise HamiltonianFormatError("parse failure", f"missing or invalid field: {e}")
    label = str(payload.get("label", "hamiltonian"))
    if not isinstance(raw_groups, list):
        raise HamiltonianFormatError("parse failure", "'groups' must be an array")

    groups: List[List[PauliString]] = []
    for l, raw_group in enumerate(raw_groups):
        if not isinstance(raw_group, list):
            raise HamiltonianFormatError("parse failure", f"group {l} must be an array")
        terms = []
        for k, raw_term in enumerate(raw_group):
            where = f"group {l} term {k}"
            try:
                letters = str(raw_term["pauli"]).upper()
                raw_coeff = raw_term["coeff"]
            except (KeyError, TypeError):
                raise HamiltonianFormatError("parse failure", f"{where}: needs 'pauli' and 'coeff'")
            if set(letters) - set(PAULI_LETTERS):
                raise HamiltonianFormatError("parse failure", f"{where}: invalid letters '{letters}'")
            if len(letters) != n_qubits:
                raise HamiltonianFormatError(
                    "letter-length mismatch", f"{where}: '{letters}' has {len(letters)} letters, n_qubits={n_qubits}"
                )
            coefficient = _parse_coefficient(raw_coeff, where)
            terms.append(PauliString(n_qubits=n_qubits, letters=letters, coefficient=coefficient))
        groups.append(terms)

    if n_qubits <= settings.max_validation_qubits:
        for l, group in enumerate(groups):
            for a in range(len(group)):
                for b in range(a + 1, len(group)):
                    if not group[a].commutes_with(group[b]):
                        raise HamiltonianFormatError(
                            "non-commuting group", f"group {l}: '{group[a].letters}' vs '{group[b].letters}'"
                        )
    else:
        logger.info(f"Trusting declared grouping of {label}: n={n_qubits} above validation limit")
    try:
        return GroupedHamiltonian(n_qubits=n_qubits, groups=groups, label=label)
    except ValidationError as e:
        raise HamiltonianFormatError("parse failure", str(e))

def load_hamiltonian(path: Union[str, Path]) -> GroupedHamiltonian:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise HamiltonianFormatError("parse failure", f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise HamiltonianFormatError("parse failure", f"{path}: {e}")
    H = parse_hamiltonian(payload)
    logger.info(f"Loaded {H.label} from {path}: n={H.n_qubits}, L={H.num_groups}, terms={H.num_terms}")
    return H

def save_hamiltonian(H: GroupedHamiltonian, path: Union[str, Path]) -> None:
    # repr-exact floats keep the round trip lossless
    Path(path).write_text(json.dumps(H.to_payload(), indent=2), encoding="utf-8")
