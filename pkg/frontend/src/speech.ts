// Speech output via the platform speech facility, with a visible fallback.

export function speechAvailable(): boolean {
    return typeof window !== "undefined" && "speechSynthesis" in window;
}

/** Speak the phrase aloud; returns false when no synthesizer exists and
 *  the caller should display the text prominently instead. */
export function speak(words: string[]): boolean {
    if (!speechAvailable()) return false;
    const utterance = new SpeechSynthesisUtterance(words.join(" "));
    window.speechSynthesis.speak(utterance);
    return true;
}
