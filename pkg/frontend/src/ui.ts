/**
 * DOM rendering for the labeling and agreement passes.  All state changes
 * go through the session module; this file only draws and wires events.
 */

import { tallyAgreement, BUCKETS } from "./agreement.js";
import {
  LabelSession,
  progress,
  setAgreement,
  setLabel,
  visibleEvents,
} from "./session.js";
import { AGREEMENT_CATEGORIES, AgreementCategory, LabelFile, TopicExport } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderError(container: HTMLElement, message: string): void {
  container.replaceChildren();
  const banner = el("div", "error-banner");
  banner.appendChild(el("strong", undefined, "Cannot load file. "));
  banner.appendChild(el("span", undefined, message));
  container.appendChild(banner);
}

export function renderEmptyState(container: HTMLElement): void {
  container.replaceChildren(
    el("div", "empty-state", "This export contains no topics; nothing to label."),
  );
}

function featureRow(name: string, value: number): HTMLElement {
  const row = el("div", "feature");
  row.appendChild(el("span", "feature-name", name));
  row.appendChild(
    el("span", "feature-value", Number.isInteger(value) ? String(value) : value.toFixed(2)),
  );
  return row;
}

export interface RenderOptions {
  onChange: () => void;
  otherCoder?: LabelFile | null; // present during the agreement pass
}

export function renderSession(
  container: HTMLElement,
  session: LabelSession,
  exported: TopicExport,
  options: RenderOptions,
): void {
  container.replaceChildren();
  if (exported.topics.length === 0) {
    renderEmptyState(container);
    return;
  }
  const status = el("div", "progress");
  const updateStatus = () => {
    const { labeled, total } = progress(session);
    status.textContent = `${session.coderId}: ${labeled} of ${total} topics labeled`;
  };
  updateStatus();
  container.appendChild(status);

  const others = options.otherCoder
    ? new Map(options.otherCoder.labels.map((l) => [l.topic_id, l]))
    : null;

  for (const card of exported.topics) {
    const section = el("section", "topic-card");
    section.appendChild(el("h2", undefined, `Topic ${card.topic_id}`));

    const features = el("div", "features");
    features.appendChild(featureRow("events", card.features.event_count));
    features.appendChild(featureRow("prominence", card.features.prominence));
    features.appendChild(featureRow("magnitude", card.features.magnitude));
    features.appendChild(featureRow("deviance", card.features.deviance));
    section.appendChild(features);

    const cores = el("div", "article-list");
    cores.appendChild(el("h3", undefined, "Most frequent core articles"));
    const coreList = el("ul");
    for (const { article, count } of card.top_core_articles) {
      coreList.appendChild(el("li", undefined, `${article} (${count})`));
    }
    cores.appendChild(coreList);
    section.appendChild(cores);

    const tops = el("div", "article-list");
    tops.appendChild(el("h3", undefined, "Top articles by weight"));
    const topList = el("ul");
    for (const { article, weight } of card.top_articles) {
      topList.appendChild(el("li", undefined, `${article} (${weight.toFixed(3)})`));
    }
    tops.appendChild(topList);
    section.appendChild(tops);

    const eventsBlock = el("div", "events");
    eventsBlock.appendChild(el("h3", undefined, "Related events"));
    const eventList = el("ul");
    let expanded = false;
    const redrawEvents = () => {
      eventList.replaceChildren();
      for (const event of visibleEvents(card, expanded)) {
        eventList.appendChild(el("li", undefined, `${event.date} · ${event.description}`));
      }
    };
    redrawEvents();
    eventsBlock.appendChild(eventList);
    if (card.events.length > 5) {
      const more = el("button", "show-more", `Show all ${card.events.length} events`);
      more.addEventListener("click", () => {
        expanded = !expanded;
        more.textContent = expanded
          ? "Show fewer events"
          : `Show all ${card.events.length} events`;
        redrawEvents();
      });
      eventsBlock.appendChild(more);
    }
    section.appendChild(eventsBlock);

    const entry = session.entries.get(card.topic_id);
    const labelBox = el("div", "label-entry");
    const input = el("input") as HTMLInputElement;
    input.type = "text";
    input.placeholder = "free-text topic label";
    input.value = entry?.label ?? "";
    input.addEventListener("input", () => {
      setLabel(session, card.topic_id, input.value);
      updateStatus();
      options.onChange();
    });
    labelBox.appendChild(input);
    section.appendChild(labelBox);

    if (others) {
      const other = others.get(card.topic_id);
      const compare = el("div", "agreement-pass");
      compare.appendChild(el("h3", undefined, "Agreement"));
      const side = el("div", "side-by-side");
      side.appendChild(el("div", "label-mine", `You: ${entry?.label ?? "(no label)"}`));
      side.appendChild(
        el("div", "label-theirs", `Other coder: ${other?.label ?? "(no label)"}`),
      );
      compare.appendChild(side);
      const choices = el("div", "agreement-choices");
      for (const category of AGREEMENT_CATEGORIES) {
        const lab = el("label");
        const radio = el("input") as HTMLInputElement;
        radio.type = "radio";
        radio.name = `agreement-${card.topic_id}`;
        radio.value = category;
        radio.checked = entry?.agreement === category;
        radio.disabled = !entry;
        radio.addEventListener("change", () => {
          setAgreement(session, card.topic_id, category as AgreementCategory);
          options.onChange();
        });
        lab.appendChild(radio);
        lab.appendChild(document.createTextNode(category.replace("_", "/")));
        choices.appendChild(lab);
      }
      compare.appendChild(choices);
      section.appendChild(compare);
    }
    container.appendChild(section);
  }

  if (others && options.otherCoder) {
    const summary = el("div", "tally");
    summary.appendChild(el("h3", undefined, "Current agreement tally"));
    const mine: LabelFile = {
      coder_id: session.coderId,
      labels: [...session.entries.entries()].map(([topic_id, e]) => ({
        topic_id,
        label: e.label,
        agreement: e.agreement,
      })),
      version: 1,
    };
    const tally = tallyAgreement(mine, options.otherCoder);
    const list = el("ul");
    for (const bucket of BUCKETS) {
      list.appendChild(
        el(
          "li",
          undefined,
          `${bucket.replace("_", " ")}: ${tally.counts[bucket]} (${tally.percentages[bucket].toFixed(1)}%)`,
        ),
      );
    }
    summary.appendChild(list);
    container.appendChild(summary);
  }
}
