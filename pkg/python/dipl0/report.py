"""
Run reports.

A report is plain text: ``[section]`` headers followed by ``key = value``
lines (values JSON-encoded), and a final ``[history]`` section holding a
comma-separated table with one row per outer iteration. Floats are
written with ``repr`` so a report parses back to an equal structure.
"""
import csv
import io
import json
import dataclasses
from dataclasses import dataclass, field

from dipl0.admm import IterationRecord

__all__ = [
    'HISTORY_FIELDS',
    'RunReport',
    'write_report',
    'read_report',
]

HISTORY_FIELDS = [f.name for f in dataclasses.fields(IterationRecord)]
_INT_FIELDS = ('t', 'l0_count', 'l0_count_v')
_BOOL_FIELDS = ('prox_identity',)


def _flatten(d, prefix=''):
    out = {}
    for key, value in d.items():
        if isinstance(value, dict):
            out.update(_flatten(value, f'{prefix}{key}.'))
        else:
            out[f'{prefix}{key}'] = value
    return out


def _unflatten(d):
    out = {}
    for key, value in d.items():
        node = out
        parts = key.split('.')
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _fmt(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name, text):
    if text == '':
        return None
    if name in _INT_FIELDS:
        return int(text)
    if name in _BOOL_FIELDS:
        if text not in ('True', 'False'):
            raise ValueError(f'{name}: expected True or False, given {text!r}')
        return text == 'True'
    return float(text)


@dataclass
class RunReport:
    """
    Configuration, per-iteration history, optional timings and output paths of a run.

    Attributes
    ----------
    config: dict
        `RunConfig.to_dict` snapshot, seeds included.
    history: list of IterationRecord
    timing: dict or None
        Seconds spent in ``theta_step``, ``v_step`` and ``total``. Left out
        of the serialized form unless set.
    outputs: dict
        Named output files.
    """
    config: dict
    history: list = field(default_factory=list)
    timing: dict = None
    outputs: dict = field(default_factory=dict)

    @classmethod
    def from_run(cls, cfg, history, timing=None, outputs=None):
        return cls(config=cfg.to_dict(), history=list(history),
                   timing=None if timing is None else dict(timing),
                   outputs=dict(outputs or {}))

    def to_text(self):
        lines = ['# dipl0 run report', '[config]']
        for key, value in _flatten(self.config).items():
            lines.append(f'{key} = {json.dumps(value)}')
        if self.outputs:
            lines.append('[outputs]')
            lines.extend(f'{k} = {json.dumps(v)}' for k, v in self.outputs.items())
        if self.timing is not None:
            lines.append('[timing]')
            lines.extend(f'{k} = {json.dumps(v)}' for k, v in self.timing.items())
        lines.append('[history]')

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(HISTORY_FIELDS)
        for rec in self.history:
            writer.writerow([_fmt(getattr(rec, name)) for name in HISTORY_FIELDS])
        return '\n'.join(lines) + '\n' + buf.getvalue()

    @classmethod
    def from_text(cls, text):
        sections = {}
        history_lines = None
        current = None
        for line in text.splitlines():
            if history_lines is not None:
                if line:
                    history_lines.append(line)
                continue
            if not line or line.startswith('#'):
                continue
            if line.startswith('[') and line.endswith(']'):
                current = line[1:-1]
                if current == 'history':
                    history_lines = []
                else:
                    sections[current] = {}
                continue
            if current is None or '=' not in line:
                raise ValueError(f'malformed report line: {line!r}')
            key, _, value = line.partition('=')
            sections[current][key.strip()] = json.loads(value.strip())

        if 'config' not in sections or history_lines is None:
            raise ValueError('report needs [config] and [history] sections')
        history = []
        rows = list(csv.reader(history_lines))
        if rows:
            header, rows = rows[0], rows[1:]
            if header != HISTORY_FIELDS:
                raise ValueError(f'unexpected history columns {header}')
            for row in rows:
                history.append(IterationRecord(**{n: _parse(n, v) for n, v in zip(header, row)}))
        return cls(config=_unflatten(sections['config']), history=history,
                   timing=sections.get('timing'), outputs=sections.get('outputs', {}))


def write_report(report, path):
    with open(path, 'w', newline='') as fp:
        fp.write(report.to_text())


def read_report(path):
    """
    Returns
    -------
    out: RunReport
    """
    with open(path, 'r', newline='') as fp:
        return RunReport.from_text(fp.read())
