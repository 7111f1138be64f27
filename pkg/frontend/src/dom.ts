// Tiny DOM construction helper; all views render through it.

export type Child = Node | string | null | undefined;

export function h(
  tag: string,
  attrs: Record<string, string | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElement {
  const element = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      element.addEventListener(key.replace(/^on/, ""), value);
    } else if (key === "class") {
      element.className = value;
    } else {
      element.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    element.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return element;
}

/** Split text around a UTF-8 byte span [start, end) — offsets on this API
 * are byte offsets, not UTF-16 code units. */
export function spanSegments(
  text: string,
  start: number,
  end: number,
): { before: string; inside: string; after: string } | null {
  const bytes = new TextEncoder().encode(text);
  if (start < 0 || end > bytes.length || start > end) return null;
  const decoder = new TextDecoder("utf-8", { fatal: false });
  return {
    before: decoder.decode(bytes.slice(0, start)),
    inside: decoder.decode(bytes.slice(start, end)),
    after: decoder.decode(bytes.slice(end)),
  };
}
