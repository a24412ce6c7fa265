"""Sensitive-data categories, sink kinds, and the keyword vocabulary.

The lexicon drives three things: the fallback categorizer for learned
source findings, the rules-only surface used when no models are present,
and the identifier pools the benchmark generator draws from. Matching is
on subtokens, so ``dbPassword`` hits ``password`` but ``valid`` never
hits ``id``.
"""

from __future__ import annotations

import enum

from .embeddings import subtokenize
from .javasrc.model import CodeElement, ElementKind


class SensitiveCategory(enum.Enum):
    AUTH_CREDENTIALS = "AuthCredentials"
    PII = "PII"
    FINANCIAL = "Financial"
    SENSITIVE_FILES_PATHS = "SensitiveFilesPaths"
    SYSTEM_CONFIG = "SystemConfig"
    SECURITY_ENCRYPTION = "SecurityEncryption"
    APP_SPECIFIC = "AppSpecific"
    QUERY_PARAMETERS = "QueryParameters"


class SinkKind(enum.Enum):
    PRINT_OUTPUT = "PrintOutput"
    LOGGING = "Logging"
    ERROR_MESSAGE = "ErrorMessage"
    SERVLET_RESPONSE = "ServletResponse"
    FILE_WRITE = "FileWrite"
    NETWORK_SEND = "NetworkSend"
    PROCESS_INVOCATION = "ProcessInvocation"
    QUERY_STRING_BUILD = "QueryStringBuild"


# Each pattern is a tuple of subtokens that must all be present.
# Categories are checked in this order; first hit wins.
CATEGORY_PATTERNS: dict[SensitiveCategory, list[tuple[str, ...]]] = {
    SensitiveCategory.AUTH_CREDENTIALS: [
        ("password",), ("passwd",), ("pwd",), ("secret",), ("credential",),
        ("credentials",), ("token",), ("api", "key"), ("auth",),
        ("login", "secret"), ("passphrase",), ("otp",), ("passcode",),
        ("pin", "code"), ("verification", "code"), ("user", "name"),
        ("username",), ("db", "user"),
    ],
    SensitiveCategory.SECURITY_ENCRYPTION: [
        ("encryption",), ("private", "key"), ("signing", "key"), ("keystore",),
        ("certificate",), ("cert", "file"), ("cipher",), ("salt",),
        ("crypto",), ("hmac",), ("aes", "key"), ("rsa", "key"), ("master", "key"),
    ],
    SensitiveCategory.FINANCIAL: [
        ("card", "number"), ("credit",), ("cvv",), ("iban",),
        ("account", "number"), ("account", "id"), ("bank",), ("payment",),
        ("salary",), ("invoice",), ("balance",), ("billing",),
    ],
    SensitiveCategory.PII: [
        ("ssn",), ("social", "security"), ("email",), ("phone",),
        ("address",), ("birth",), ("dob",), ("patient",), ("medical",),
        ("health",), ("passport",), ("first", "name"), ("last", "name"),
        ("surname",), ("national", "id"), ("insurance",),
    ],
    SensitiveCategory.QUERY_PARAMETERS: [
        ("query", "param"), ("query", "string"), ("request", "param"),
        ("url", "param"), ("get", "param"), ("form", "param"),
    ],
    SensitiveCategory.SYSTEM_CONFIG: [
        ("jdbc",), ("connection", "string"), ("connection", "url"),
        ("db", "url"), ("db", "user"), ("db", "host"), ("db", "name"),
        ("datasource",), ("config",), ("env", "var"), ("environment",),
        ("hostname",), ("schema",), ("server", "address"),
    ],
    SensitiveCategory.SENSITIVE_FILES_PATHS: [
        ("internal", "url"), ("internal", "uri"), ("internal", "path"),
        ("key", "path"), ("cert", "path"), ("backup",), ("dump", "file"),
        ("credentials", "file"), ("private", "path"), ("secrets", "dir"),
    ],
    SensitiveCategory.APP_SPECIFIC: [
        ("device", "id"), ("imei",), ("mac", "address"), ("serial", "number"),
        ("license",), ("session", "id"), ("notification",), ("tenant", "id"),
    ],
}


def match_category(text: str) -> SensitiveCategory | None:
    """First category whose pattern is fully contained in the subtokens."""
    tokens = set(subtokenize(text))
    if not tokens:
        return None
    for category, patterns in CATEGORY_PATTERNS.items():
        for pattern in patterns:
            if all(tok in tokens for tok in pattern):
                return category
    return None


def is_sensitive_name(text: str) -> bool:
    return match_category(text) is not None


# ----------------------------------------------------------------------
# Identifier pools for the benchmark generator and synthetic training data.
# Every sensitive name must match its own category's lexicon (the harness
# tests enforce this), and no innocuous name may match any category.

SENSITIVE_NAME_POOLS: dict[SensitiveCategory, list[str]] = {
    SensitiveCategory.AUTH_CREDENTIALS: [
        "dbPassword", "adminPassword", "apiKey", "secretToken", "authToken",
        "userCredentials", "loginSecret", "masterPasswd", "accessToken",
        "servicePassword", "rootPwd", "oauthToken",
    ],
    SensitiveCategory.PII: [
        "patientId", "socialSecurityNumber", "customerEmail", "homeAddress",
        "phoneNumber", "birthDate", "medicalRecord", "passportNumber",
        "patientSsn", "firstName", "healthRecordId", "insuranceNumber",
    ],
    SensitiveCategory.FINANCIAL: [
        "creditCardNumber", "cardNumber", "cvvCode", "ibanCode",
        "bankAccountNumber", "paymentId", "accountBalance", "salaryAmount",
        "billingAccountId", "invoiceTotal",
    ],
    SensitiveCategory.SENSITIVE_FILES_PATHS: [
        "internalUrl", "keyPath", "certPath", "backupLocation",
        "credentialsFile", "dumpFilePath", "internalUri", "secretsDir",
        "privatePathName", "backupArchive",
    ],
    SensitiveCategory.SYSTEM_CONFIG: [
        "jdbcUrl", "connectionString", "dbUrl", "dbUserName", "dbHostName",
        "datasourceUri", "configSchema", "environmentName", "serverAddress",
        "connectionUrl",
    ],
    SensitiveCategory.SECURITY_ENCRYPTION: [
        "encryptionKey", "privateKey", "signingKey", "keystoreFile",
        "certificateBlob", "cipherSalt", "cryptoSeed", "hmacSecret",
        "aesKeyBytes", "masterKeyHex",
    ],
    SensitiveCategory.APP_SPECIFIC: [
        "deviceId", "imeiNumber", "macAddress", "serialNumber",
        "licenseCode", "sessionId", "tenantId", "notificationBody",
        "deviceIdToken", "imeiValue",
    ],
    SensitiveCategory.QUERY_PARAMETERS: [
        "queryParamValue", "requestParamToken", "urlParamData",
        "queryStringPayload", "getParamValue", "formParamEntry",
        "queryParamSsn", "requestParamEmail",
    ],
}

INNOCUOUS_NAMES: list[str] = [
    "greeting", "counter", "itemCount", "labelText", "widgetTitle",
    "colorValue", "statusNote", "displayWidth", "retryLimit", "pageSize",
    "sortOrder", "menuEntry", "tempReading", "frameRate", "chunkLength",
    "totalScore", "rowIndex", "columnOffset", "shapeKind", "animationSpeed",
    "bufferSpan", "timeoutMillis", "themeChoice", "fontScale", "gridSpacing",
    "iterationStep", "localeTag", "versionLabel", "batchWindow", "pollDelay",
]

SENSITIVE_STRING_POOL: list[str] = [
    "jdbc:mysql://prod-db:3306/records", "Bearer secretToken12345",
    "admin password is stored in vault", "ssn=078-05-1120",
    "apiKey=AKIA99EXAMPLE", "https://internal.example.com/keys",
    "mongodb://dbUser:dbPassword@db:27017", "card=4111111111111111 cvv=123",
    "privateKey path /etc/ssl/private/server.pem", "token=eyJhbGciOiJIUzI1NiJ9",
]

INNOCUOUS_STRING_POOL: list[str] = [
    "Welcome to the dashboard", "Processing complete", "north-west corner",
    "retry in a moment", "Started background job", "All rows loaded",
    "cache warmed", "render finished", "Good morning", "shutdown scheduled",
]

SENSITIVE_COMMENT_POOL: list[str] = [
    "TODO remove: default admin password is hunter2",
    "staging apiKey = sk-test-9911 do not commit",
    "patient ssn kept in the legacy column",
    "db password rotates monthly, current one is in this file",
    "private key below is for the demo certificate",
    "auth token hardcoded for the pilot tenant",
]

INNOCUOUS_COMMENT_POOL: list[str] = [
    "refresh the cache before rendering",
    "loop bounds checked by the caller",
    "fall back to defaults when empty",
    "sort ascending for display",
    "helper keeps the layout stable",
    "retry once on transient failures",
]


# ----------------------------------------------------------------------
# Built-in sink rule list. Receiver-qualified call names map onto one of
# the eight sink kinds; the list stays active even with trained models so
# the print/log/error/servlet families are always recognized.

_LOG_METHODS = frozenset(
    "log info warn warning error debug trace fine finer finest severe config fatal".split())
_LOG_RECEIVERS = frozenset({"logger", "log", "logging", "logs"})
_SERVLET_METHODS = frozenset(
    "print println printf write format sendError sendRedirect setHeader addHeader".split())
_FILE_RECEIVERS = frozenset(
    {"writer", "filewriter", "fw", "bufferedwriter", "bw", "fos",
     "fileoutputstream", "outfile", "filestream"})
_FILE_METHODS = frozenset({"write", "append", "print", "println", "writestring"})
_NETWORK_METHODS = frozenset(
    {"send", "sendto", "senddata", "sendtoserver", "transmit", "emit",
     "dispatch", "post", "postdata", "writetosocket", "broadcast"})
_QUERY_METHODS = frozenset(
    {"sendget", "httpget", "openconnection", "openstream", "getforobject",
     "appendqueryparam", "addqueryparam", "buildquery", "buildquerystring",
     "setquery", "fetchurl"})
_PROCESS_METHODS = frozenset({"exec", "execcommand", "runshell", "runprocess"})


def _receiver_tokens(qualified: str | None, name: str) -> set[str]:
    if not qualified or qualified == name:
        return set()
    receiver = qualified[: -(len(name) + 1)] if qualified.endswith("." + name) else qualified
    last = receiver.split(".")[-1].split("(")[0]
    return set(subtokenize(last)) | {last.lower()}


def rule_list_sink_kind(element: CodeElement) -> SinkKind | None:
    """Classify a call element with the always-on sink rules, if any apply."""
    if element.kind is not ElementKind.API_CALL:
        return None
    name = element.name
    lname = name.lower()
    qualified = element.qualified_name or name
    recv = _receiver_tokens(qualified, name)

    if qualified.startswith(("response.", "resp.", "res.")) or ".getWriter()" in qualified:
        if name in _SERVLET_METHODS:
            return SinkKind.SERVLET_RESPONSE
    if name in ("sendError", "sendRedirect") :
        return SinkKind.SERVLET_RESPONSE
    if qualified.startswith("System.err."):
        return SinkKind.ERROR_MESSAGE
    if name == "printStackTrace":
        return SinkKind.ERROR_MESSAGE
    if qualified.startswith("new ") and (name.endswith("Exception") or name.endswith("Error")):
        return SinkKind.ERROR_MESSAGE
    if qualified.startswith("System.out.") or (recv & {"console"} and lname.startswith("print")):
        if lname.startswith("print") or lname == "write" or lname == "format":
            return SinkKind.PRINT_OUTPUT
    if recv & _LOG_RECEIVERS and lname in _LOG_METHODS:
        return SinkKind.LOGGING
    if lname in _PROCESS_METHODS or qualified in ("new ProcessBuilder",):
        return SinkKind.PROCESS_INVOCATION
    if recv & {"processbuilder", "procbuilder"} and lname in ("command", "start"):
        return SinkKind.PROCESS_INVOCATION
    if lname in _NETWORK_METHODS:
        return SinkKind.NETWORK_SEND
    if recv & {"socket", "channel"} and lname in ("write", "send"):
        return SinkKind.NETWORK_SEND
    if lname in _QUERY_METHODS or qualified == "new URL":
        return SinkKind.QUERY_STRING_BUILD
    if qualified.startswith("Files.") and lname in ("write", "writestring"):
        return SinkKind.FILE_WRITE
    if recv & _FILE_RECEIVERS and lname in _FILE_METHODS:
        return SinkKind.FILE_WRITE
    return None


# Call-shape pools per sink kind for synthetic sink training data:
# (receiver-qualified name, simple name).
SINK_CALL_POOLS: dict[SinkKind, list[tuple[str, str]]] = {
    SinkKind.PRINT_OUTPUT: [
        ("System.out.println", "println"), ("System.out.print", "print"),
        ("System.out.printf", "printf"), ("console.printf", "printf"),
    ],
    SinkKind.LOGGING: [
        ("logger.info", "info"), ("logger.warn", "warn"), ("log.error", "error"),
        ("logger.debug", "debug"), ("LOG.severe", "severe"), ("log.trace", "trace"),
    ],
    SinkKind.ERROR_MESSAGE: [
        ("System.err.println", "println"), ("e.printStackTrace", "printStackTrace"),
        ("new RuntimeException", "RuntimeException"),
        ("new IllegalStateException", "IllegalStateException"),
    ],
    SinkKind.SERVLET_RESPONSE: [
        ("response.getWriter().println", "println"), ("response.sendError", "sendError"),
        ("resp.getWriter().print", "print"), ("response.addHeader", "addHeader"),
    ],
    SinkKind.FILE_WRITE: [
        ("fileWriter.write", "write"), ("Files.write", "write"),
        ("bufferedWriter.append", "append"), ("fw.write", "write"),
    ],
    SinkKind.NETWORK_SEND: [
        ("connection.send", "send"), ("socketChannel.write", "write"),
        ("client.post", "post"), ("publisher.broadcast", "broadcast"),
        ("uplink.transmit", "transmit"),
    ],
    SinkKind.PROCESS_INVOCATION: [
        ("runtime.exec", "exec"), ("Runtime.getRuntime().exec", "exec"),
        ("new ProcessBuilder", "ProcessBuilder"), ("shell.runShell", "runShell"),
    ],
    SinkKind.QUERY_STRING_BUILD: [
        ("requester.sendGet", "sendGet"), ("new URL", "URL"),
        ("api.getForObject", "getForObject"), ("http.httpGet", "httpGet"),
        ("endpoint.openConnection", "openConnection"),
    ],
}

NON_SINK_CALL_POOL: list[tuple[str, str]] = [
    ("Math.max", "max"), ("Math.abs", "abs"), ("list.add", "add"),
    ("map.get", "get"), ("value.trim", "trim"), ("builder.reverse", "reverse"),
    ("Integer.parseInt", "parseInt"), ("names.size", "size"),
    ("text.substring", "substring"), ("items.contains", "contains"),
    ("String.valueOf", "valueOf"), ("obj.hashCode", "hashCode"),
]
