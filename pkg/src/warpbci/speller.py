"""Virtual T9/ABC predictive-keyboard state machine.

Four regions cycle under a three-second dwell highlight:
Keypad -> Suggestions -> Backspace -> Phrase -> Keypad (an empty
suggestion region is skipped). A double blink picks the highlighted
item; a double jaw clench speaks the phrase from anywhere. Transitions
are pure: (state, input) fully determines (state', outputs), so scripted
sessions replay bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .lexicon import T9_KEYS, Lexicon
from .online import ArtifactEvent


class LayoutKind(str, Enum):
    T9 = "t9"
    ABC = "abc"


class Region(str, Enum):
    KEYPAD = "keypad"
    SUGGESTIONS = "suggestions"
    BACKSPACE = "backspace"
    PHRASE = "phrase"


_REGION_CYCLE = (Region.KEYPAD, Region.SUGGESTIONS, Region.BACKSPACE, Region.PHRASE)

T9_KEYPAD = tuple(f"{digit} {T9_KEYS[digit]}" for digit in sorted(T9_KEYS))
ABC_KEYPAD = tuple("abcdefghijklmnopqrstuvwxyz")


def keypad_for(layout: LayoutKind) -> tuple[str, ...]:
    return T9_KEYPAD if layout is LayoutKind.T9 else ABC_KEYPAD


# ---------------------------------------------------------------------------
# outputs

@dataclass(frozen=True)
class SpellerOutput:
    pass


@dataclass(frozen=True)
class CharAppended(SpellerOutput):
    char: str


@dataclass(frozen=True)
class BackspaceApplied(SpellerOutput):
    pass


@dataclass(frozen=True)
class WordCommitted(SpellerOutput):
    word: str


@dataclass(frozen=True)
class SpeakPhrase(SpellerOutput):
    words: tuple[str, ...]


@dataclass(frozen=True)
class StateChanged(SpellerOutput):
    snapshot: dict


def output_to_dict(out: SpellerOutput) -> dict:
    if isinstance(out, CharAppended):
        return {"output": "char_appended", "char": out.char}
    if isinstance(out, BackspaceApplied):
        return {"output": "backspace_applied"}
    if isinstance(out, WordCommitted):
        return {"output": "word_committed", "word": out.word}
    if isinstance(out, SpeakPhrase):
        return {"output": "speak_phrase", "words": list(out.words)}
    if isinstance(out, StateChanged):
        return {"output": "state_changed", "snapshot": out.snapshot}
    raise TypeError(f"unknown output {out!r}")


# ---------------------------------------------------------------------------
# state

@dataclass(frozen=True)
class SpellerState:
    layout: LayoutKind
    region: Region = Region.KEYPAD
    highlight: int = 0
    current_word: str = ""
    suggestions: tuple[str, ...] = ()
    phrase: tuple[str, ...] = ()
    dwell_ms: int = 3000
    dwell_elapsed: int = 0
    clock_ms: int = 0

    def region_size(self, region: Region | None = None) -> int:
        region = region or self.region
        if region is Region.KEYPAD:
            return len(keypad_for(self.layout))
        if region is Region.SUGGESTIONS:
            return len(self.suggestions)
        return 1

    def highlighted_key(self) -> str:
        if self.region is Region.KEYPAD:
            return keypad_for(self.layout)[self.highlight]
        if self.region is Region.SUGGESTIONS:
            return self.suggestions[self.highlight]
        return self.region.value


def _suggest(lexicon: Lexicon, layout: LayoutKind, word: str) -> tuple[str, ...]:
    if layout is LayoutKind.T9:
        return tuple(lexicon.suggest_t9(word, limit=5))
    return tuple(lexicon.suggest_prefix(word, limit=5))


def new_speller(
    lexicon: Lexicon, layout: LayoutKind = LayoutKind.T9, dwell_ms: int = 3000
) -> SpellerState:
    state = SpellerState(layout=layout, dwell_ms=dwell_ms)
    return replace(state, suggestions=_suggest(lexicon, layout, ""))


def snapshot(state: SpellerState) -> dict:
    """Complete render model with a stable field order."""
    return {
        "layout": state.layout.value,
        "region": state.region.value,
        "highlight_index": state.highlight,
        "keypad": list(keypad_for(state.layout)),
        "current_word": state.current_word,
        "suggestions": list(state.suggestions),
        "phrase": list(state.phrase),
        "dwell_ms": state.dwell_ms,
        "dwell_remaining_ms": state.dwell_ms - state.dwell_elapsed,
        "clock_ms": state.clock_ms,
    }


def _advance_highlight(state: SpellerState) -> SpellerState:
    nxt = state.highlight + 1
    if nxt < state.region_size():
        return replace(state, highlight=nxt)
    region = state.region
    while True:
        region = _REGION_CYCLE[(_REGION_CYCLE.index(region) + 1) % len(_REGION_CYCLE)]
        if state.region_size(region) > 0:
            return replace(state, region=region, highlight=0)


def tick(state: SpellerState, elapsed_ms: int) -> tuple[SpellerState, list[SpellerOutput]]:
    """Advance the dwell clock; each expiry moves the highlight one key."""
    if elapsed_ms < 0:
        raise ValueError("elapsed_ms must be >= 0")
    if elapsed_ms == 0:
        return state, []
    state = replace(
        state,
        clock_ms=state.clock_ms + elapsed_ms,
        dwell_elapsed=state.dwell_elapsed + elapsed_ms,
    )
    outputs: list[SpellerOutput] = []
    while state.dwell_elapsed >= state.dwell_ms:
        state = _advance_highlight(
            replace(state, dwell_elapsed=state.dwell_elapsed - state.dwell_ms)
        )
        outputs.append(StateChanged(snapshot(state)))
    return state, outputs


def _rest(state: SpellerState) -> SpellerState:
    """After a selection, highlighting resumes at the keypad start."""
    return replace(state, region=Region.KEYPAD, highlight=0, dwell_elapsed=0)


def _select(state: SpellerState, lexicon: Lexicon) -> tuple[SpellerState, list[SpellerOutput]]:
    outputs: list[SpellerOutput] = []
    if state.region is Region.KEYPAD:
        key = keypad_for(state.layout)[state.highlight]
        char = key[0]  # T9 keys are "<digit> <letters>"; ABC keys are letters
        word = state.current_word + char
        state = replace(
            state, current_word=word, suggestions=_suggest(lexicon, state.layout, word)
        )
        outputs.append(CharAppended(char))
    elif state.region is Region.SUGGESTIONS:
        word = state.suggestions[state.highlight]
        state = replace(
            state,
            phrase=state.phrase + (word,),
            current_word="",
            suggestions=_suggest(lexicon, state.layout, ""),
        )
        outputs.append(WordCommitted(word))
    elif state.region is Region.BACKSPACE:
        word = state.current_word[:-1]
        state = replace(
            state, current_word=word, suggestions=_suggest(lexicon, state.layout, word)
        )
        outputs.append(BackspaceApplied())
    else:  # Region.PHRASE
        outputs.append(SpeakPhrase(state.phrase))
        state = replace(state, phrase=())
    state = _rest(state)
    outputs.append(StateChanged(snapshot(state)))
    return state, outputs


def on_event(
    state: SpellerState, ev: ArtifactEvent, lexicon: Lexicon
) -> tuple[SpellerState, list[SpellerOutput]]:
    """Apply one gesture event.

    Blink(2) selects the highlighted item; JawClench(2) speaks the phrase
    from any region; single blinks and unknown events change nothing.
    """
    if ev.kind == "JawClench" and ev.count == 2:
        outputs = [SpeakPhrase(state.phrase)]
        state = _rest(replace(state, phrase=()))
        outputs.append(StateChanged(snapshot(state)))
        return state, outputs
    if ev.kind == "Blink" and ev.count == 2:
        return _select(state, lexicon)
    if ev.kind in ("Blink", "JawClench"):
        return state, [StateChanged(snapshot(state))]
    return state, []
