/**
 * App entry: wires file pickers, autosave, and the save-to-file button.
 * Coders work fully offline; the label file download is the only output.
 */

import { renderError, renderSession } from "./ui.js";
import {
  LabelSession,
  createSession,
  restoreSession,
  serializeLabelFile,
} from "./session.js";
import { LabelFile, TopicExport, parseLabelFile, parseTopicExport } from "./types.js";

interface AppState {
  exported: TopicExport | null;
  session: LabelSession | null;
  otherCoder: LabelFile | null;
}

const state: AppState = { exported: null, session: null, otherCoder: null };

function storageKey(coderId: string): string {
  return `coattention-labels:${coderId}`;
}

function autosave(): void {
  if (state.session) {
    localStorage.setItem(
      storageKey(state.session.coderId),
      serializeLabelFile(state.session),
    );
  }
}

function redraw(): void {
  const container = document.getElementById("topics");
  if (!container || !state.exported || !state.session) return;
  renderSession(container, state.session, state.exported, {
    onChange: autosave,
    otherCoder: state.otherCoder,
  });
}

async function readFile(input: HTMLInputElement): Promise<string | null> {
  const file = input.files?.[0];
  if (!file) return null;
  return await file.text();
}

function wire(): void {
  const container = document.getElementById("topics")!;
  const exportInput = document.getElementById("export-file") as HTMLInputElement;
  const coderInput = document.getElementById("coder-id") as HTMLInputElement;
  const resumeInput = document.getElementById("resume-file") as HTMLInputElement;
  const otherInput = document.getElementById("other-file") as HTMLInputElement;
  const saveButton = document.getElementById("save-labels") as HTMLButtonElement;

  exportInput.addEventListener("change", async () => {
    const text = await readFile(exportInput);
    if (text === null) return;
    const parsed = parseTopicExport(text);
    if (!parsed.ok) {
      renderError(container, parsed.error);
      state.exported = null;
      state.session = null;
      return;
    }
    state.exported = parsed.data;
    const coderId = coderInput.value.trim() || "coder";
    const saved = localStorage.getItem(storageKey(coderId));
    state.session = saved
      ? restoreSession(saved, parsed.data)
      : createSession(coderId, parsed.data);
    redraw();
  });

  resumeInput.addEventListener("change", async () => {
    const text = await readFile(resumeInput);
    if (text === null || !state.exported) return;
    try {
      state.session = restoreSession(text, state.exported);
    } catch (err) {
      renderError(container, (err as Error).message);
      return;
    }
    redraw();
  });

  otherInput.addEventListener("change", async () => {
    const text = await readFile(otherInput);
    if (text === null) return;
    const parsed = parseLabelFile(text);
    if (!parsed.ok) {
      renderError(container, parsed.error);
      return;
    }
    state.otherCoder = parsed.data;
    redraw();
  });

  saveButton.addEventListener("click", () => {
    if (!state.session) return;
    autosave(); // keep the browser copy in case the download is cancelled
    const blob = new Blob([serializeLabelFile(state.session)], {
      type: "application/json",
    });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `labels-${state.session.coderId}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  });
}

document.addEventListener("DOMContentLoaded", wire);
