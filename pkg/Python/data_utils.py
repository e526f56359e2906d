"""
Configuration and path utilities for the Kunz workbench.

Provides:
- Engine defaults from Const/kunz_config.yaml
- Shell environment from Const/env_setting.sh
- Standard data/report/log paths
- Reduction budget resolution (flag > KUNZ_BUDGET > YAML)
- NDJSON debug log (best-effort, off unless KUNZ_DEBUG_LOG_ENABLED is set)
"""

import json
import os
import time
from pathlib import Path
from typing import Any, Dict, Optional

import yaml


def load_yaml(filepath: str) -> Dict[str, Any]:
    """Load a YAML configuration file."""
    with open(filepath, 'r') as f:
        return yaml.safe_load(f) or {}


def get_root_dir() -> Path:
    """Project root; this file lives in ROOT/Python/."""
    return Path(__file__).resolve().parent.parent


def load_env_setting(env_file: Optional[Path] = None) -> Dict[str, str]:
    """
    Parse the export lines of env_setting.sh into a dictionary.

    Values may refer to earlier exports as ${VAR} or $VAR. Values that still
    hold a shell expression after substitution are skipped. A missing file
    yields an empty dictionary.
    """
    env_file = Path(env_file) if env_file else get_root_dir() / "Const" / "env_setting.sh"
    env_vars: Dict[str, str] = {}
    if not env_file.exists():
        return env_vars

    with open(env_file, 'r') as f:
        for line in f:
            line = line.strip()
            if not line.startswith('export ') or '=' not in line:
                continue
            key, value = line[len('export '):].split('=', 1)
            value = value.split(' #', 1)[0].strip().strip('"\'')
            for known, known_val in env_vars.items():
                value = value.replace(f'${{{known}}}', known_val)
                value = value.replace(f'${known}', known_val)
            if "$" in value:
                continue
            env_vars[key.strip()] = value
    return env_vars


def load_kunz_config(config_file: Optional[Path] = None) -> Dict[str, Any]:
    """Load engine defaults (budgets, e_max, corpus sizes, report options)."""
    config_file = config_file or os.environ.get("KUNZ_CONFIG") or get_root_dir() / "Const" / "kunz_config.yaml"
    return load_yaml(str(config_file))


def config_value(config: Dict[str, Any], dotted: str, default: Any = None) -> Any:
    """config_value(cfg, "budget.reduction_steps") with a fallback."""
    node: Any = config
    for part in dotted.split('.'):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node


def get_data_paths(env: Optional[Dict[str, str]] = None) -> Dict[str, Path]:
    """
    Standard paths for the workbench.

    Returns dict with keys:
        - root: Project root
        - data: Data directory
        - kz: .kz input files
        - reports: JSON reports written by the corpus driver
        - log: debug logs
    """
    if env is None:
        env = load_env_setting()
        env.update({k: os.environ[k] for k in ("ROOT_DIR", "KUNZ_REPORT_DIR", "LOG_DIR") if os.environ.get(k)})

    root = Path(env.get('ROOT_DIR', get_root_dir()))
    data = root / "Data"

    return {
        'root': root,
        'data': data,
        'kz': data / "kz",
        'reports': Path(env.get('KUNZ_REPORT_DIR', data / "reports")),
        'log': Path(env.get('LOG_DIR', root / "Log")),
    }


def ensure_dir(path: Path) -> Path:
    """Create directory if it doesn't exist."""
    path.mkdir(parents=True, exist_ok=True)
    return path


def resolve_budget(flag: Optional[int] = None, config: Optional[Dict[str, Any]] = None,
                   environ: Optional[Dict[str, str]] = None) -> int:
    """
    Reduction-step budget: --budget flag, then KUNZ_BUDGET, then the YAML
    value, then 10^6.
    """
    if flag is not None:
        budget = int(flag)
    else:
        environ = os.environ if environ is None else environ
        raw = environ.get('KUNZ_BUDGET', '').strip()
        if raw:
            try:
                budget = int(raw)
            except ValueError:
                raise ValueError(f"KUNZ_BUDGET must be an integer, got {raw!r}") from None
        else:
            budget = int(config_value(config or {}, 'budget.reduction_steps', 10 ** 6))
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    return budget


# #region debug log
DEBUG_LOG_DEFAULT = get_root_dir() / "Log" / "kunz_debug.ndjson"


def _debug_enabled() -> bool:
    return os.environ.get("KUNZ_DEBUG_LOG_ENABLED", "0").strip().lower() in {"1", "true", "yes"}


def debug_log(hypothesis_id: str, location: str, message: str, data: dict):
    """Append debug log entry to NDJSON file (best-effort; never fatal)."""
    if not _debug_enabled():
        return
    target = Path(os.environ.get("KUNZ_DEBUG_LOG", str(DEBUG_LOG_DEFAULT)))
    entry = {
        "hypothesisId": hypothesis_id,
        "location": location,
        "message": message,
        "data": data,
        "timestamp": int(time.time()),
    }
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, default=str) + "\n")
    except OSError:
        return
# #endregion
