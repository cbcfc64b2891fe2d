"""Instruction rendering, the action JSON codec and SFT record emission."""

from cardlab.prompts.codec import action_from_value, action_value, decode_action, encode_action
from cardlab.prompts.render import load_template, render

__all__ = ["action_from_value", "action_value", "decode_action", "encode_action", "load_template", "render"]
