// Build-time configuration. Empty string targets the page's own origin;
// point this at the API host when the chat is served separately.
export const SERVICE_BASE_URL = "";
