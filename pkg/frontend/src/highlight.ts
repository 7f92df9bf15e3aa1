import type { Hint } from "./types.js";

function escapeRegExp(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}

/**
 * Split text into plain/emphasized segments for the given keyphrases.
 *
 * Word-boundary matches are preferred, then a plain case-insensitive
 * substring; a keyphrase that does not occur at all adds no emphasis.
 */
export function emphasisSegments(
  text: string,
  keyphrases: string[]
): Array<{ text: string; emphasized: boolean }> {
  const marked = new Array<boolean>(text.length).fill(false);
  for (const phrase of keyphrases) {
    if (!phrase) continue;
    const escaped = escapeRegExp(phrase).replace(/\s+/g, "\\s+");
    let matched = false;
    for (const pattern of [`\\b${escaped}\\b`, escaped]) {
      const regex = new RegExp(pattern, "gi");
      let match: RegExpExecArray | null;
      while ((match = regex.exec(text)) !== null) {
        matched = true;
        for (let i = match.index; i < match.index + match[0].length; i++) {
          marked[i] = true;
        }
        if (match.index === regex.lastIndex) regex.lastIndex++;
      }
      if (matched) break;
    }
  }
  const segments: Array<{ text: string; emphasized: boolean }> = [];
  let start = 0;
  for (let i = 1; i <= text.length; i++) {
    if (i === text.length || marked[i] !== marked[start]) {
      segments.push({ text: text.slice(start, i), emphasized: marked[start] });
      start = i;
    }
  }
  return segments.filter((s) => s.text.length > 0);
}

/** Build a hint card: "(score) text" with keyphrases wrapped in <mark>. */
export function renderHint(hint: Hint, doc: Document = document): HTMLElement {
  const card = doc.createElement("div");
  card.className = "hint-card";

  const score = doc.createElement("span");
  score.className = "hint-score";
  score.textContent = `(${hint.retrieval_score.toFixed(2)})`;
  card.appendChild(score);
  card.appendChild(doc.createTextNode(" "));

  const text = doc.createElement("span");
  text.className = "hint-text";
  for (const segment of emphasisSegments(hint.clarification_text, hint.keyphrases)) {
    if (segment.emphasized) {
      const mark = doc.createElement("mark");
      mark.textContent = segment.text;
      text.appendChild(mark);
    } else {
      text.appendChild(doc.createTextNode(segment.text));
    }
  }
  card.appendChild(text);
  return card;
}
