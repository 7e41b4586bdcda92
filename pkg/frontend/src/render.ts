// HTML/SVG renderers: view state in, markup out. Event wiring happens in
// main.ts through data attributes.

import type { MentionsView, PendingItem } from './types.js';
import type { GraphState, QueueState, ValidationState } from './state.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

// ---------------------------------------------------------------------------
// Document view: highlighted text plus the per-type entity panel
// ---------------------------------------------------------------------------

export function renderDocument(view: MentionsView): string {
  const bySentence = new Map<string, typeof view.spans>();
  for (const span of view.spans) {
    const list = bySentence.get(span.sentenceId) ?? [];
    list.push(span);
    bySentence.set(span.sentenceId, list);
  }
  const sentences = view.sentences.map((sentence) => {
    const spans = (bySentence.get(sentence.id) ?? [])
      .slice()
      .sort((a, b) => a.start - b.start);
    const parts: string[] = [];
    let cursor = 1;
    for (const span of spans) {
      for (; cursor < span.start; cursor++) {
        parts.push(escapeHtml(sentence.tokens[cursor - 1]));
      }
      const surface = sentence.tokens.slice(span.start - 1, span.end).join(' ');
      parts.push(
        `<mark class="entity" data-iri="${escapeHtml(span.linkedIri ?? '')}"` +
        ` data-type="${escapeHtml(span.type)}"` +
        ` style="background:${escapeHtml(span.color)}"` +
        ` title="${escapeHtml(span.typeLabel)}">${escapeHtml(surface)}</mark>`);
      cursor = span.end + 1;
    }
    for (; cursor <= sentence.tokens.length; cursor++) {
      parts.push(escapeHtml(sentence.tokens[cursor - 1]));
    }
    return `<p class="sentence">${parts.join(' ')}</p>`;
  });

  const panelSections = Object.entries(view.panel).map(([label, rows]) => {
    const items = rows
      .map((row, i) =>
        `<li>${i + 1}. ${escapeHtml(row.surface)} (${row.count})</li>`)
      .join('');
    return `<section class="panel-type"><h3>${escapeHtml(label)}</h3>` +
           `<ol>${items}</ol></section>`;
  });

  const reduced = view.reducedPipeline
    ? '<p class="notice">analyse réduite : texte brut sans analyse syntaxique</p>'
    : '';
  return `<div class="document-view">${reduced}` +
         `<div class="document-text">${sentences.join('')}</div>` +
         `<aside class="entity-panel">${panelSections.join('')}</aside></div>`;
}

// ---------------------------------------------------------------------------
// Queue view
// ---------------------------------------------------------------------------

export function renderQueue(state: QueueState): string {
  if (state.empty) {
    return '<p class="empty">Aucun article en attente de validation.</p>';
  }
  const rows = state.rows.map((row) => {
    const cls = row.complete ? 'queue-row complete' : 'queue-row';
    return `<tr class="${cls}" data-doc="${escapeHtml(row.documentId)}">` +
      `<td class="excerpt">${escapeHtml(row.excerpt)}</td>` +
      `<td class="progress">${escapeHtml(row.progress)}</td>` +
      `<td class="source"><a href="${escapeHtml(row.sourceUrl)}">` +
      `${escapeHtml(row.sourceUrl)}</a></td>` +
      `<td class="date">${escapeHtml(row.date)}</td></tr>`;
  });
  return '<table class="queue"><thead><tr>' +
    '<th>Extrait</th><th>Etat d\'avancement</th>' +
    '<th>Article source</th><th>Date</th>' +
    `</tr></thead><tbody>${rows.join('')}</tbody></table>`;
}

// ---------------------------------------------------------------------------
// Validation view
// ---------------------------------------------------------------------------

function renderControls(item: PendingItem): string {
  const buttons = item.options.map((option) => {
    const label = {
      'accept': 'Valider',
      'create-new-entity': 'Créer une nouvelle entrée',
      'propose-other-iri': 'Proposer une autre URI',
      'reject': 'Supprimer',
    }[option];
    return `<button data-key="${escapeHtml(item.tripleKey)}"` +
           ` data-decision="${option}">${label}</button>`;
  });
  const iriField = item.options.includes('propose-other-iri')
    ? `<input type="text" class="iri-field" placeholder="URI…"` +
      ` data-key="${escapeHtml(item.tripleKey)}">`
    : '';
  return `<div class="controls">${buttons.join('')}${iriField}</div>`;
}

export function renderValidation(state: ValidationState): string {
  const pending = state.pending.map((item) =>
    `<li class="pending-item" data-key="${escapeHtml(item.tripleKey)}">` +
    `<p class="prompt">${escapeHtml(item.prompt)}</p>` +
    `<blockquote class="context">${escapeHtml(item.sentence)}</blockquote>` +
    renderControls(item) + '</li>');
  const processed = state.processed.map((item) =>
    `<li class="processed-item">${escapeHtml(item.prompt)}` +
    ` <span class="decision">(${escapeHtml(item.decision)})</span></li>`);
  const error = state.error
    ? `<p class="error">${escapeHtml(state.error)}</p>` : '';
  return `<div class="validation-view">${error}` +
    `<h2>Termes à valider</h2><ul class="pending">${pending.join('')}</ul>` +
    `<h2>Éléments traités</h2><ul class="processed">${processed.join('')}</ul>` +
    '</div>';
}

// ---------------------------------------------------------------------------
// Entity index view
// ---------------------------------------------------------------------------

export function renderIndex(type: string,
                            buckets: Record<string, string[]>): string {
  const sections = Object.entries(buckets).map(([letter, labels]) => {
    const items = labels.map((l) =>
      `<li class="index-entry" data-label="${escapeHtml(l)}">` +
      `${escapeHtml(l)}</li>`).join('');
    return `<section class="bucket"><h3>${escapeHtml(letter)}</h3>` +
           `<ul>${items}</ul></section>`;
  });
  return `<div class="index-view" data-type="${escapeHtml(type)}">` +
         sections.join('') + '</div>';
}

// ---------------------------------------------------------------------------
// Graph view (inline SVG)
// ---------------------------------------------------------------------------

export function renderGraph(state: GraphState): string {
  const error = state.error
    ? `<p class="toast error">${escapeHtml(state.error)}</p>` : '';
  const warnings = state.warnings.map((w) =>
    `<p class="toast warning">${escapeHtml(w)}</p>`).join('');
  const edges = state.edges.map((e) =>
    `<line x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}"` +
    ` class="edge"><title>${escapeHtml(e.label)}</title></line>`);
  const nodes = state.nodes.map((n) => {
    // the tooltip carries the image URL when the KB has one (e.g. a logo)
    const tooltip = n.image ? `${n.label}\n${n.image}` : n.label;
    const picture = n.image
      ? `<image href="${escapeHtml(n.image)}" x="${n.x - 12}" y="${n.y - 12}"` +
        ' width="24" height="24" class="node-image"/>'
      : '';
    return `<g class="node${n.isCenter ? ' center' : ''}"` +
      ` data-iri="${escapeHtml(n.iri)}" data-origin="${escapeHtml(n.origin)}">` +
      `<circle cx="${n.x}" cy="${n.y}" r="${n.isCenter ? 26 : 18}"` +
      ` fill="${n.color}"><title>${escapeHtml(tooltip)}</title></circle>` +
      picture +
      `<text x="${n.x}" y="${n.y + (n.isCenter ? 42 : 32)}" text-anchor="middle">` +
      `${escapeHtml(n.label)}</text></g>`;
  });
  const legend =
    '<div class="legend">' +
    '<span class="swatch" style="background:#e67e22"></span> base locale ' +
    '<span class="swatch" style="background:#2980b9"></span> DBpedia ' +
    '<span class="swatch" style="background:#7f8c8d"></span> NetSent' +
    '</div>';
  return `<div class="graph-view">${error}${warnings}` +
    `<svg viewBox="0 0 720 480">${edges.join('')}${nodes.join('')}</svg>` +
    legend + '</div>';
}
