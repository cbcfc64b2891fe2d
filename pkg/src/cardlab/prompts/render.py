"""Fill the per-game instruction templates with observation values.

Each template has a block of slot lines between the line announcing the
information list and the closing "Please tell me" request. A slot's value
is written on the label line itself, separated by one space unless the label
already ends in a space.

Value conventions:
  * strings and numbers are written bare, ``None`` as ``None``;
  * lists and dicts are JSON, so card lists keep each game's action notation;
  * histories are ``(seat, action)`` pairs joined by ``", "``, with the action
    as JSON, or ``None`` when empty;
  * the legal-action slot is the JSON list of action values, so each
    ``{"action": ...}`` output's value appears in it verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from cardlab.cards import ALL_GAMES, GameId, game_id
from cardlab.core import Observation
from cardlab.errors import MissingField

_INTRO = "I will provide you with the following information:"
_OUTRO = "Please tell me"

SLOTS: dict[GameId, tuple[str, ...]] = {
    GameId.DOUDIZHU: (
        "turn", "role", "hand", "others_hand", "last_move", "played_cards",
        "num_cards_left", "num_bombs", "history", "legal_actions",
    ),
    GameId.GUANDAN: (
        "position", "hand", "remaining_cards", "last_action", "teammate_last_action", "num_cards_left",
        "played_down", "played_teammate", "played_up", "self_rank", "opponent_rank", "current_rank",
        "legal_actions",
    ),
    GameId.UNO: (
        "step", "position", "hand", "top_card", "played_cards", "num_cards_left", "history", "legal_actions",
    ),
    GameId.GIN_RUMMY: (
        "step", "id", "hand", "top_discard", "other_discards", "opponent_known", "stock_count",
        "history", "legal_actions",
    ),
    GameId.LEDUC: (
        "round", "position", "hand", "public_card", "my_chips", "all_chips", "raises", "history", "legal_actions",
    ),
    GameId.LIMIT: (
        "round", "position", "hole_cards", "community_cards", "my_chips", "all_chips", "raises",
        "history", "legal_actions",
    ),
    GameId.NOLIMIT: (
        "round", "position", "hole_cards", "community_cards", "my_chips", "all_chips", "pot", "stacks",
        "history", "legal_actions",
    ),
    GameId.MAHJONG: (
        "player_id", "bakaze", "jikaze", "kyoku", "honba", "kyotaku", "oya", "scores", "rank", "at_turn",
        "tiles_left", "shanten", "hand", "wait_tiles", "dora_indicators", "dora_owned", "akas_in_hand",
        "doras_seen", "akas_seen", "tiles_seen", "ankan_candidates", "kakan_candidates", "kawa_overview",
        "fuuro_overview", "ankan_overview", "last_tedashis", "riichi_sutehais", "last_self_tsumo",
        "last_kawa_tile", "riichi_declared", "riichi_accepted", "can_riichi", "is_riichi", "at_furiten",
        "is_menzen", "legal_actions",
    ),
}


@dataclass(frozen=True)
class PromptTemplate:
    game: GameId
    lines: tuple[str, ...]
    # (line index, observation field) for every slot, in template order
    slots: tuple[tuple[int, str], ...]

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    @property
    def preamble(self) -> str:
        """Fixed text up to the first slot line."""
        return "\n".join(self.lines[: self.slots[0][0]]) + "\n"

    def fill(self, values: dict[str, str]) -> str:
        out = list(self.lines)
        for i, key in self.slots:
            value = values[key]
            if value == "":
                continue
            label = out[i]
            out[i] = label + value if label.endswith(" ") else f"{label} {value}"
        return "\n".join(out) + "\n"


def _slot_lines(lines) -> list[int]:
    start = next(i for i, line in enumerate(lines) if line.endswith(_INTRO))
    stop = next(i for i in range(start, len(lines)) if lines[i].startswith(_OUTRO))
    return [i for i in range(start + 1, stop) if lines[i].strip()]


@lru_cache(maxsize=None)
def load_template(game) -> PromptTemplate:
    g = game_id(game)
    text = resources.files("cardlab.prompts").joinpath("templates", f"{g.value}.txt").read_text(encoding="utf-8")
    lines = tuple(text.replace("\r\n", "\n").rstrip("\n").split("\n"))
    idx = _slot_lines(lines)
    keys = SLOTS[g]
    if len(idx) != len(keys):
        raise ValueError(f"{g.value} template has {len(idx)} slot lines, expected {len(keys)}")
    return PromptTemplate(g, lines, tuple(zip(idx, keys)))


def _json(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def format_value(key: str, value) -> str:
    if key == "legal_actions":
        return _json(list(value))
    if key == "history":
        if not value:
            return "None"
        return ", ".join(f"({seat}, {_json(action)})" for seat, action in value)
    if value is None:
        return "None"
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        return str(value)
    return _json(value)


def render(game, obs) -> str:
    """Instruction text for one decision point. ``obs`` is an Observation or a field dict."""
    template = load_template(game)
    fields = obs.fields if isinstance(obs, Observation) else obs
    values = {}
    for _, key in template.slots:
        if key not in fields:
            raise MissingField(key)
        values[key] = format_value(key, fields[key])
    return template.fill(values)


def legal_line(instruction: str) -> str:
    """The serialized legal-action list inside a rendered instruction."""
    lines = instruction.split("\n")
    stop = next(i for i, line in enumerate(lines) if line.startswith(_OUTRO))
    for line in reversed(lines[:stop]):
        if line.strip():
            return line.split(":", 1)[1].strip()
    raise ValueError("instruction has no legal-action line")


def template_games() -> tuple[GameId, ...]:
    return ALL_GAMES
